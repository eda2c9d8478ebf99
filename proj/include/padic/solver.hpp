#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "padic/tree.hpp"

namespace padic {

/// Parameter set of a p-adic discrete DNN at working level L + Delta.
struct NetworkParams {
  Prime p;
  LevelPair levels;
  Activation phi;      // hidden-layer activation
  Activation varphi;   // output activation
  TreeKernel W;        // level L + Delta
  TreeKernel W_in;     // level L (lifted on use)
  TreeKernel W_out;    // level L + Delta
  TreeFunction xi;     // level L + Delta
  TreeFunction xi_out; // level L + Delta

  void validate() const;
};

struct SolveReport {
  TreeFunction state;   // h
  TreeFunction output;  // y
  std::uint64_t iterations;
  double residual;       // ||Th - h||_2
  double contraction_q;  // L_phi * ||W||_2
  bool stable;           // q < 1
  bool converged;        // stopping rule met before max_iter
  bool norm_bound_ok;    // ||h|| <= M_phi ||W|| + ||W_in|| ||x|| + ||xi||
};

/// Th = integral W phi(h) + integral W_in x + xi, at level L + Delta.
TreeFunction forward_map(const NetworkParams& params, const TreeFunction& x,
                         const TreeFunction& h);

/// L_phi * ||W||_2; the stability threshold is 1.
double contraction_constant(const NetworkParams& params);

/// Picard iteration from h0 (default 0). Divergence (q >= 1, budget
/// exhausted) is reported, not thrown.
SolveReport solve(const NetworkParams& params, const TreeFunction& x,
                  double tol, std::uint64_t max_iter,
                  const std::optional<TreeFunction>& h0 = std::nullopt);

/// Membership test for the constant-state set X_alpha:
/// alpha = phi(alpha) * rowsum(I) + drive(I) at every index.
bool check_constant_state(const NetworkParams& params, const TreeFunction& x,
                          double alpha, double tol);

/// Scalar fixed point alpha = a * phi(alpha) + c; Picard when |a| L < 1,
/// bisection fallback otherwise.
double solve_constant_scalar(double a, double c, const Activation& phi);

/// Smallest n with q^n * first_step / (1 - q) <= tol (a-priori Banach bound).
std::uint64_t theoretical_iteration_budget(double q, double first_step,
                                           double tol);

struct IntervalSolveResult {
  std::vector<double> values;  // grid solution at x_j = j/N
  std::uint64_t iterations;
  bool converged;
};

/// Trapezoid-quadrature Picard solver for h(x) = int W(x,y) phi(h(y)) dy + c
/// on the uniform grid over [0,1]; W sampled at grid points, (N+1)^2 values.
IntervalSolveResult solve_interval(const std::vector<std::vector<double>>& W,
                                   const Activation& phi, std::uint64_t N,
                                   double tol, std::uint64_t max_iter,
                                   double drive = 0.0);

}  // namespace padic
