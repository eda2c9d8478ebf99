#include "padic/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace padic {

void NetworkParams::validate() const {
  const std::uint32_t l = levels.total();
  if (W.level != l || W_out.level != l || xi.level != l || xi_out.level != l)
    throw DomainError("NetworkParams: W, W_out, xi, xi_out must be at level L+Delta");
  if (W_in.level > levels.L)
    throw DomainError("NetworkParams: W_in must be at level <= L");
  if (!(W.p == p) || !(W_in.p == p) || !(W_out.p == p) || !(xi.p == p) ||
      !(xi_out.p == p))
    throw DomainError("NetworkParams: mixed primes");
}

TreeFunction forward_map(const NetworkParams& params, const TreeFunction& x,
                         const TreeFunction& h) {
  const std::uint32_t l = params.levels.total();
  if (x.level > params.levels.L)
    throw DomainError("forward_map: input level above L");
  if (h.level > l) throw DomainError("forward_map: state level above L+Delta");
  TreeFunction hl = lift(h, l);
  TreeFunction z = apply_kernel(params.W, apply_activation(params.phi, hl));
  TreeFunction drive = apply_kernel(lift(params.W_in, l), x);
  return add(add(z, drive), params.xi);
}

double contraction_constant(const NetworkParams& params) {
  return params.phi.lipschitz * kernel_l2_norm(params.W);
}

SolveReport solve(const NetworkParams& params, const TreeFunction& x,
                  double tol, std::uint64_t max_iter,
                  const std::optional<TreeFunction>& h0) {
  params.validate();
  if (tol <= 0) throw DomainError("solve: tol must be positive");
  const std::uint32_t l = params.levels.total();
  const double q = contraction_constant(params);
  const double eps = std::numeric_limits<double>::epsilon();

  // Successive-difference threshold from the a-posteriori bound
  // ||h_n - h*|| <= q/(1-q) ||h_n - h_{n-1}||.
  const double threshold = q < 1.0 ? tol * (1.0 - q) / std::max(q, eps) : 0.0;

  const TreeKernel w_in_lifted = lift(params.W_in, l);
  const TreeFunction drive =
      add(apply_kernel(w_in_lifted, x), params.xi);

  TreeFunction h = h0 ? lift(*h0, l) : TreeFunction::zero(params.p, l);
  std::uint64_t iters = 0;
  bool converged = false;
  while (iters < max_iter) {
    TreeFunction next =
        add(apply_kernel(params.W, apply_activation(params.phi, h)), drive);
    ++iters;
    const double diff = l2_norm(sub(next, h));
    h = std::move(next);
    // Absolute stop covers maps that contract pointwise even when the
    // L2 kernel bound q is >= 1 (e.g. diagonal self-coupling kernels).
    if (diff <= threshold || diff <= 1e-15 * std::max(1.0, l2_norm(h))) {
      converged = true;
      break;
    }
  }

  TreeFunction th =
      add(apply_kernel(params.W, apply_activation(params.phi, h)), drive);
  const double residual = l2_norm(sub(th, h));

  TreeFunction y = add(
      apply_kernel(params.W_out, apply_activation(params.varphi, h)),
      params.xi_out);

  bool norm_ok = true;
  if (params.phi.bounded()) {
    const double bound = params.phi.sup_norm * kernel_l2_norm(params.W) +
                         kernel_l2_norm(params.W_in) * l2_norm(x) +
                         l2_norm(params.xi);
    norm_ok = l2_norm(h) <= bound + 1e-10;
  }

  return SolveReport{std::move(h), std::move(y), iters,     residual,
                     q,            q < 1.0,      converged, norm_ok};
}

bool check_constant_state(const NetworkParams& params, const TreeFunction& x,
                          double alpha, double tol) {
  const std::uint32_t l = params.levels.total();
  const std::uint64_t n = params.W.side();
  const double hw = haar_weight(params.p, l);
  TreeFunction drive = add(apply_kernel(lift(params.W_in, l), x), params.xi);
  const double phi_alpha = params.phi.eval(alpha);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) rowsum += params.W.at(i, k);
    rowsum *= hw;
    worst = std::max(worst,
                     std::fabs(alpha - (phi_alpha * rowsum + drive.coeffs[i])));
  }
  return worst <= tol;
}

double solve_constant_scalar(double a, double c, const Activation& phi) {
  auto residual = [&](double alpha) { return alpha - a * phi.eval(alpha) - c; };
  if (std::fabs(a) * phi.lipschitz < 1.0) {
    double alpha = 0.0;
    for (int i = 0; i < 100000; ++i) {
      double next = a * phi.eval(alpha) + c;
      if (std::fabs(next - alpha) < 1e-16 * std::max(1.0, std::fabs(next))) {
        alpha = next;
        break;
      }
      alpha = next;
    }
    if (std::fabs(residual(alpha)) < 1e-13) return alpha;
  }
  // Bisection fallback: scan [-1e3, 1e3] for a sign change.
  const double lo_lim = -1e3, hi_lim = 1e3;
  const int segments = 4000;
  double prev_x = lo_lim, prev_f = residual(lo_lim);
  for (int s = 1; s <= segments; ++s) {
    double x = lo_lim + (hi_lim - lo_lim) * s / segments;
    double f = residual(x);
    if (prev_f == 0.0) return prev_x;
    if ((prev_f < 0.0) != (f < 0.0)) {
      double lo = prev_x, hi = x, flo = prev_f;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = residual(mid);
        if (fm == 0.0) return mid;
        if ((flo < 0.0) != (fm < 0.0)) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev_x = x;
    prev_f = f;
  }
  throw DomainError("solve_constant_scalar: no bracket found in [-1e3, 1e3]");
}

std::uint64_t theoretical_iteration_budget(double q, double first_step,
                                           double tol) {
  if (!(q > 0.0 && q < 1.0))
    throw DomainError("theoretical_iteration_budget: requires 0 < q < 1");
  if (first_step < 0 || tol <= 0)
    throw DomainError("theoretical_iteration_budget: bad step/tol");
  const double target = tol * (1.0 - q);
  if (first_step <= target) return 0;
  double n_est = std::log(target / first_step) / std::log(q);
  std::uint64_t n = static_cast<std::uint64_t>(
      std::max(0.0, std::ceil(n_est) - 2.0));
  while (std::pow(q, static_cast<double>(n)) * first_step > target) ++n;
  return n;
}

IntervalSolveResult solve_interval(const std::vector<std::vector<double>>& W,
                                   const Activation& phi, std::uint64_t N,
                                   double tol, std::uint64_t max_iter,
                                   double drive) {
  if (N < 1) throw DomainError("solve_interval: N must be >= 1");
  if (W.size() != N + 1)
    throw DomainError("solve_interval: W must be (N+1) x (N+1)");
  for (const auto& row : W)
    if (row.size() != N + 1)
      throw DomainError("solve_interval: W must be (N+1) x (N+1)");

  const double dx = 1.0 / static_cast<double>(N);
  std::vector<double> h(N + 1, 0.0), phih(N + 1), next(N + 1);
  std::uint64_t iters = 0;
  bool converged = false;
  while (iters < max_iter) {
    for (std::uint64_t j = 0; j <= N; ++j) phih[j] = phi.eval(h[j]);
    for (std::uint64_t j = 0; j <= N; ++j) {
      double s = 0.0;
      for (std::uint64_t k = 1; k <= N; ++k)
        s += W[j][k - 1] * phih[k - 1] + W[j][k] * phih[k];
      next[j] = 0.5 * s * dx + drive;
    }
    ++iters;
    double diff = 0.0;
    for (std::uint64_t j = 0; j <= N; ++j)
      diff = std::max(diff, std::fabs(next[j] - h[j]));
    h = next;
    if (diff < tol) {
      converged = true;
      break;
    }
  }
  return IntervalSolveResult{std::move(h), iters, converged};
}

}  // namespace padic
