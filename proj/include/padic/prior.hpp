#pragma once

#include <cstdint>
#include <vector>

#include "padic/linalg.hpp"
#include "padic/tree.hpp"

namespace padic {

/// Covariance kernel K(u, y) of a Gaussian bias prior at level l.
struct BiasCovariance {
  Prime p;
  std::uint32_t level;
  Matrix kernel;  // p^l x p^l, symmetric PSD

  void validate() const;
  static BiasCovariance zero(Prime p, std::uint32_t level);
  static BiasCovariance iid(Prime p, std::uint32_t level, double sigma2);
};

enum class WeightForm { Iid, Separable, Dense };

/// Covariance kernel of a Gaussian weight prior: iid scalar sigma^2,
/// separable A(u1,y1) B(u2,y2), or a dense 4-index array K(u1,u2,y1,y2)
/// stored with index ((u1*n + u2)*n + y1)*n + y2.
struct WeightCovariance {
  Prime p;
  std::uint32_t level;
  WeightForm form;
  double sigma2 = 0.0;
  Matrix A, B;
  std::vector<double> dense;

  void validate() const;
  double entry(std::uint64_t u1, std::uint64_t u2, std::uint64_t y1,
               std::uint64_t y2) const;
  /// L^2 kernel norm: sqrt of the p^{-4l}-weighted square sum for the
  /// 4-index array; sigma^2 p^{-l} for iid; ||A|| ||B|| for separable.
  double kernel_norm() const;
  /// The equivalent dense representation (small levels only).
  WeightCovariance to_dense() const;

  static WeightCovariance iid(Prime p, std::uint32_t level, double sigma2);
  static WeightCovariance separable(Prime p, std::uint32_t level, Matrix A,
                                    Matrix B);
  static WeightCovariance make_dense(Prime p, std::uint32_t level,
                                     std::vector<double> k);
};

struct PriorCovariance {
  Matrix hidden;  // C_xx + K_xi + C_phiphi
  Matrix output;  // K_xiout + C_varphivarphi
};

struct NetworkPriors {
  WeightCovariance w;
  WeightCovariance w_in;
  WeightCovariance w_out;
  BiasCovariance xi;
  BiasCovariance xi_out;

  void validate() const;
};

/// One realization of the random parameters.
struct ParameterDraw {
  TreeKernel W;
  TreeKernel W_in;
  TreeKernel W_out;
  TreeFunction xi;
  TreeFunction xi_out;
};

/// C_phiphi(u1, x) = p^{-2l} sum_{u2,y} phi(h(u2)) K(u1,u2,x,y) phi(h(y)).
Matrix c_phiphi(const WeightCovariance& cov, const TreeFunction& h_prev,
                const Activation& phi);

/// Same contraction with x in place of phi(h).
Matrix c_xx(const WeightCovariance& cov, const TreeFunction& x);

PriorCovariance prior_covariance(const NetworkPriors& priors,
                                 const TreeFunction& h_prev,
                                 const TreeFunction& h_cur,
                                 const TreeFunction& x, const Activation& phi,
                                 const Activation& varphi);

/// Log density of the coefficient vector y under the mean-zero Gaussian with
/// coefficient covariance cov (jitter 1e-12 * trace / n added before
/// factorization).
double gaussian_logpdf(const Matrix& cov, const std::vector<double>& y);

ParameterDraw sample_parameters(const NetworkPriors& priors,
                                std::uint64_t seed,
                                std::uint64_t stream = 0);

struct McReport {
  Matrix analytic_hidden, analytic_output;
  Matrix empirical_hidden, empirical_output;
  double max_abs_z;
  double frac_within_3se;
  std::uint64_t N;
  std::uint64_t seed;
};

/// Draws N parameter realizations, forms h = W phi(h_fixed) + W_in x + xi and
/// y = W_out varphi(h_fixed) + xi_out, and compares empirical covariances
/// with prior_covariance entrywise.
McReport mc_validate(const NetworkPriors& priors, const TreeFunction& h_fixed,
                     const TreeFunction& x, const Activation& phi,
                     const Activation& varphi, std::uint64_t N,
                     std::uint64_t seed);

struct NormBoundReport {
  double bound;   // L_phi^2 ||h||_2^2 ||K_W||_2
  double actual;  // ||C_phiphi||_2 as a level-l kernel
};

NormBoundReport c_phiphi_norm_bound(const WeightCovariance& cov,
                                    const TreeFunction& h,
                                    const Activation& phi);

}  // namespace padic
