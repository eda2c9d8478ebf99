#include "padic/prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "padic/reduce.hpp"
#include "padic/rng.hpp"
#include "padic/threading.hpp"

namespace padic {

namespace {

void require_psd(const Matrix& m, const char* what) {
  auto eig = sym_eigenvalues(m);
  double lo = 0.0, hi = 0.0;
  for (double e : eig) {
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  if (lo < -1e-10 * std::max(hi, 1e-300))
    throw NumericError(std::string(what) + ": not positive semidefinite");
}

double weighted_kernel_norm(const Matrix& m, double hw) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(hw * hw * s);
}

bool all_zero(const std::vector<double>& v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

double matrix_jitter(const Matrix& m) {
  double tr = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i) tr += m.at(i, i);
  return 1e-12 * tr / static_cast<double>(m.rows);
}

}  // namespace

void BiasCovariance::validate() const {
  const std::uint64_t n = pow_checked(p.value(), level);
  if (kernel.rows != n || kernel.cols != n)
    throw DomainError("BiasCovariance: kernel must be p^l x p^l");
  if (!kernel.symmetric())
    throw DomainError("BiasCovariance: kernel not symmetric");
  require_psd(kernel, "BiasCovariance");
}

BiasCovariance BiasCovariance::zero(Prime p, std::uint32_t level) {
  const std::uint64_t n = pow_checked(p.value(), level);
  return BiasCovariance{p, level, Matrix(n, n)};
}

BiasCovariance BiasCovariance::iid(Prime p, std::uint32_t level,
                                   double sigma2) {
  const std::uint64_t n = pow_checked(p.value(), level);
  Matrix k(n, n);
  for (std::uint64_t i = 0; i < n; ++i) k.at(i, i) = sigma2;
  return BiasCovariance{p, level, std::move(k)};
}

void WeightCovariance::validate() const {
  const std::uint64_t n = pow_checked(p.value(), level);
  switch (form) {
    case WeightForm::Iid:
      if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
        throw DomainError("WeightCovariance: sigma2 must be finite, >= 0");
      break;
    case WeightForm::Separable:
      if (A.rows != n || A.cols != n || B.rows != n || B.cols != n)
        throw DomainError("WeightCovariance: A, B must be p^l x p^l");
      if (!A.symmetric() || !B.symmetric())
        throw DomainError("WeightCovariance: A, B must be symmetric");
      require_psd(A, "WeightCovariance A");
      require_psd(B, "WeightCovariance B");
      break;
    case WeightForm::Dense: {
      if (dense.size() != n * n * n * n)
        throw DomainError("WeightCovariance: dense array must hold p^{4l} values");
      for (std::uint64_t u1 = 0; u1 < n; ++u1)
        for (std::uint64_t u2 = 0; u2 < n; ++u2)
          for (std::uint64_t y1 = 0; y1 < n; ++y1)
            for (std::uint64_t y2 = 0; y2 < n; ++y2)
              if (entry(u1, u2, y1, y2) != entry(y1, y2, u1, u2))
                throw DomainError(
                    "WeightCovariance: pair-exchange symmetry violated");
      if (n <= 8) {
        Matrix flat(n * n, n * n);
        for (std::uint64_t u1 = 0; u1 < n; ++u1)
          for (std::uint64_t u2 = 0; u2 < n; ++u2)
            for (std::uint64_t y1 = 0; y1 < n; ++y1)
              for (std::uint64_t y2 = 0; y2 < n; ++y2)
                flat.at(u1 * n + u2, y1 * n + y2) = entry(u1, u2, y1, y2);
        require_psd(flat, "WeightCovariance dense");
      }
      break;
    }
  }
}

double WeightCovariance::entry(std::uint64_t u1, std::uint64_t u2,
                               std::uint64_t y1, std::uint64_t y2) const {
  const std::uint64_t n = pow_checked(p.value(), level);
  switch (form) {
    case WeightForm::Iid:
      return (u1 == y1 && u2 == y2) ? sigma2 : 0.0;
    case WeightForm::Separable:
      return A.at(u1, y1) * B.at(u2, y2);
    default:
      return dense[((u1 * n + u2) * n + y1) * n + y2];
  }
}

double WeightCovariance::kernel_norm() const {
  const double hw = haar_weight(p, level);
  switch (form) {
    case WeightForm::Iid:
      return sigma2 * hw;
    case WeightForm::Separable:
      return weighted_kernel_norm(A, hw) * weighted_kernel_norm(B, hw);
    default: {
      double s = 0.0;
      for (double v : dense) s += v * v;
      return std::sqrt(hw * hw * hw * hw * s);
    }
  }
}

WeightCovariance WeightCovariance::to_dense() const {
  const std::uint64_t n = pow_checked(p.value(), level);
  std::vector<double> k(n * n * n * n);
  for (std::uint64_t u1 = 0; u1 < n; ++u1)
    for (std::uint64_t u2 = 0; u2 < n; ++u2)
      for (std::uint64_t y1 = 0; y1 < n; ++y1)
        for (std::uint64_t y2 = 0; y2 < n; ++y2)
          k[((u1 * n + u2) * n + y1) * n + y2] = entry(u1, u2, y1, y2);
  return make_dense(p, level, std::move(k));
}

WeightCovariance WeightCovariance::iid(Prime p, std::uint32_t level,
                                       double sigma2) {
  WeightCovariance c{p, level, WeightForm::Iid};
  c.sigma2 = sigma2;
  return c;
}

WeightCovariance WeightCovariance::separable(Prime p, std::uint32_t level,
                                             Matrix A, Matrix B) {
  WeightCovariance c{p, level, WeightForm::Separable};
  c.A = std::move(A);
  c.B = std::move(B);
  return c;
}

WeightCovariance WeightCovariance::make_dense(Prime p, std::uint32_t level,
                                              std::vector<double> k) {
  WeightCovariance c{p, level, WeightForm::Dense};
  c.dense = std::move(k);
  return c;
}

void NetworkPriors::validate() const {
  w.validate();
  w_in.validate();
  w_out.validate();
  xi.validate();
  xi_out.validate();
  if (w.level != w_in.level || w.level != w_out.level ||
      w.level != xi.level || w.level != xi_out.level)
    throw DomainError("NetworkPriors: all covariances must share one level");
  if (!(w.p == w_in.p) || !(w.p == w_out.p) || !(w.p == xi.p) ||
      !(w.p == xi_out.p))
    throw DomainError("NetworkPriors: mixed primes");
}

namespace {

Matrix contract(const WeightCovariance& cov, const std::vector<double>& f) {
  const std::uint64_t n = pow_checked(cov.p.value(), cov.level);
  if (f.size() != n) throw DomainError("covariance contraction: level mismatch");
  const double hw = haar_weight(cov.p, cov.level);
  Matrix c(n, n);
  switch (cov.form) {
    case WeightForm::Iid: {
      double s = 0.0;
      for (double v : f) s += v * v;
      const double d = cov.sigma2 * hw * hw * s;
      for (std::uint64_t i = 0; i < n; ++i) c.at(i, i) = d;
      break;
    }
    case WeightForm::Separable: {
      const std::vector<double> bf = matvec(cov.B, f);
      double s = 0.0;
      for (std::uint64_t i = 0; i < n; ++i) s += f[i] * bf[i];
      s *= hw * hw;
      for (std::uint64_t i = 0; i < n; ++i)
        for (std::uint64_t j = 0; j < n; ++j) c.at(i, j) = cov.A.at(i, j) * s;
      break;
    }
    case WeightForm::Dense:
      for (std::uint64_t u1 = 0; u1 < n; ++u1)
        for (std::uint64_t x = 0; x < n; ++x) {
          double s = 0.0;
          for (std::uint64_t u2 = 0; u2 < n; ++u2)
            for (std::uint64_t y = 0; y < n; ++y)
              s += f[u2] * cov.entry(u1, u2, x, y) * f[y];
          c.at(u1, x) = hw * hw * s;
        }
      break;
  }
  return c;
}

}  // namespace

Matrix c_phiphi(const WeightCovariance& cov, const TreeFunction& h_prev,
                const Activation& phi) {
  if (!(cov.p == h_prev.p) || cov.level != h_prev.level)
    throw DomainError("c_phiphi: level/prime mismatch");
  std::vector<double> f(h_prev.coeffs.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = phi.eval(h_prev.coeffs[i]);
  return contract(cov, f);
}

Matrix c_xx(const WeightCovariance& cov, const TreeFunction& x) {
  if (!(cov.p == x.p) || cov.level != x.level)
    throw DomainError("c_xx: level/prime mismatch");
  return contract(cov, x.coeffs);
}

namespace {

Matrix symmetrize(const Matrix& m) {
  Matrix s(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      s.at(i, j) = 0.5 * (m.at(i, j) + m.at(j, i));
  return s;
}

Matrix madd(const Matrix& x, const Matrix& y) {
  if (x.rows != y.rows || x.cols != y.cols)
    throw DomainError("matrix add: shape mismatch");
  Matrix z = x;
  for (std::size_t i = 0; i < z.a.size(); ++i) z.a[i] += y.a[i];
  return z;
}

}  // namespace

PriorCovariance prior_covariance(const NetworkPriors& priors,
                                 const TreeFunction& h_prev,
                                 const TreeFunction& h_cur,
                                 const TreeFunction& x, const Activation& phi,
                                 const Activation& varphi) {
  priors.validate();
  Matrix hidden =
      madd(madd(c_xx(priors.w_in, x), priors.xi.kernel),
           c_phiphi(priors.w, h_prev, phi));
  Matrix output = madd(priors.xi_out.kernel, c_phiphi(priors.w_out, h_cur, varphi));
  hidden = symmetrize(hidden);
  output = symmetrize(output);
  require_psd(hidden, "prior_covariance hidden");
  require_psd(output, "prior_covariance output");
  return PriorCovariance{std::move(hidden), std::move(output)};
}

double gaussian_logpdf(const Matrix& cov, const std::vector<double>& y) {
  if (cov.rows != cov.cols || cov.rows != y.size())
    throw DomainError("gaussian_logpdf: shape mismatch");
  const std::size_t n = cov.rows;
  Matrix low(0, 0);
  try {
    low = cholesky(cov, 0.0);
  } catch (const NumericError&) {
    low = cholesky(cov, matrix_jitter(cov));
  }
  // Forward substitution: z = L^{-1} y.
  std::vector<double> z(n);
  double quad = 0.0, logdet = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= low.at(i, k) * z[k];
    z[i] = s / low.at(i, i);
    quad += z[i] * z[i];
    logdet += 2.0 * std::log(low.at(i, i));
  }
  return -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) +
                 logdet + quad);
}

namespace {

struct BiasSampler {
  std::size_t n;
  bool zero;
  Matrix low;

  explicit BiasSampler(const BiasCovariance& cov)
      : n(cov.kernel.rows), zero(all_zero(cov.kernel.a)) {
    if (!zero) low = cholesky(cov.kernel, matrix_jitter(cov.kernel));
  }

  std::vector<double> draw(CounterRng& rng) const {
    std::vector<double> z(n);
    for (auto& v : z) v = rng.normal();
    if (zero) return std::vector<double>(n, 0.0);
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k <= i; ++k) out[i] += low.at(i, k) * z[k];
    return out;
  }
};

struct WeightSampler {
  WeightForm form;
  std::uint64_t n;
  bool zero = false;
  double sigma = 0.0;
  Matrix la, lb, lflat;

  explicit WeightSampler(const WeightCovariance& cov)
      : form(cov.form), n(pow_checked(cov.p.value(), cov.level)) {
    switch (form) {
      case WeightForm::Iid:
        sigma = std::sqrt(cov.sigma2);
        zero = sigma == 0.0;
        break;
      case WeightForm::Separable:
        zero = all_zero(cov.A.a) || all_zero(cov.B.a);
        if (!zero) {
          la = cholesky(cov.A, matrix_jitter(cov.A));
          lb = cholesky(cov.B, matrix_jitter(cov.B));
        }
        break;
      case WeightForm::Dense: {
        zero = all_zero(cov.dense);
        if (!zero) {
          Matrix flat(n * n, n * n);
          for (std::uint64_t u1 = 0; u1 < n; ++u1)
            for (std::uint64_t u2 = 0; u2 < n; ++u2)
              for (std::uint64_t y1 = 0; y1 < n; ++y1)
                for (std::uint64_t y2 = 0; y2 < n; ++y2)
                  flat.at(u1 * n + u2, y1 * n + y2) = cov.entry(u1, u2, y1, y2);
          lflat = cholesky(flat, matrix_jitter(flat));
        }
        break;
      }
    }
  }

  TreeKernel draw(const Prime& p, std::uint32_t level, CounterRng& rng) const {
    std::vector<double> g(n * n);
    for (auto& v : g) v = rng.normal();
    std::vector<double> w(n * n, 0.0);
    if (!zero) {
      switch (form) {
        case WeightForm::Iid:
          for (std::size_t i = 0; i < w.size(); ++i) w[i] = sigma * g[i];
          break;
        case WeightForm::Separable: {
          // W = LA G LB^T gives Cov[W(i,k) W(j,l)] = A(i,j) B(k,l).
          Matrix gm(n, n);
          gm.a = g;
          Matrix prod = matmul(matmul(la, gm), transpose(lb));
          w = prod.a;
          break;
        }
        case WeightForm::Dense:
          for (std::size_t i = 0; i < w.size(); ++i)
            for (std::size_t k = 0; k <= i; ++k) w[i] += lflat.at(i, k) * g[k];
          break;
      }
    }
    return TreeKernel(p, level, std::move(w));
  }
};

struct SamplerPlan {
  WeightSampler w, w_in, w_out;
  BiasSampler xi, xi_out;

  explicit SamplerPlan(const NetworkPriors& priors)
      : w(priors.w), w_in(priors.w_in), w_out(priors.w_out), xi(priors.xi),
        xi_out(priors.xi_out) {}

  ParameterDraw draw(const Prime& p, std::uint32_t level, std::uint64_t seed,
                     std::uint64_t stream) const {
    CounterRng rng(seed, stream);
    TreeKernel kw = w.draw(p, level, rng);
    TreeKernel kwin = w_in.draw(p, level, rng);
    TreeKernel kwout = w_out.draw(p, level, rng);
    TreeFunction fxi(p, level, xi.draw(rng));
    TreeFunction fxiout(p, level, xi_out.draw(rng));
    return ParameterDraw{std::move(kw), std::move(kwin), std::move(kwout),
                         std::move(fxi), std::move(fxiout)};
  }
};

}  // namespace

ParameterDraw sample_parameters(const NetworkPriors& priors, std::uint64_t seed,
                                std::uint64_t stream) {
  priors.validate();
  SamplerPlan plan(priors);
  return plan.draw(priors.w.p, priors.w.level, seed, stream);
}

McReport mc_validate(const NetworkPriors& priors, const TreeFunction& h_fixed,
                     const TreeFunction& x, const Activation& phi,
                     const Activation& varphi, std::uint64_t N,
                     std::uint64_t seed) {
  if (N < 2) throw DomainError("mc_validate: N must be >= 2");
  priors.validate();
  const Prime p = priors.w.p;
  const std::uint32_t level = priors.w.level;
  const std::uint64_t n = pow_checked(p.value(), level);
  if (h_fixed.level != level || x.level != level)
    throw DomainError("mc_validate: h/x must be at the prior level");

  PriorCovariance analytic =
      prior_covariance(priors, h_fixed, h_fixed, x, phi, varphi);
  SamplerPlan plan(priors);
  const TreeFunction phih = apply_activation(phi, h_fixed);
  const TreeFunction varphih = apply_activation(varphi, h_fixed);

  std::vector<double> hs(N * n), ys(N * n);
  parallel_for(N, [&](std::size_t d) {
    ParameterDraw draw = plan.draw(p, level, seed, d);
    TreeFunction h = add(add(apply_kernel(draw.W, phih),
                             apply_kernel(draw.W_in, x)),
                         draw.xi);
    TreeFunction y = add(apply_kernel(draw.W_out, varphih), draw.xi_out);
    for (std::uint64_t i = 0; i < n; ++i) {
      hs[d * n + i] = h.coeffs[i];
      ys[d * n + i] = y.coeffs[i];
    }
  });

  auto empirical = [&](const std::vector<double>& vals) {
    Matrix emp(n, n);
    std::vector<double> prod(N);
    for (std::uint64_t i = 0; i < n; ++i)
      for (std::uint64_t j = i; j < n; ++j) {
        for (std::uint64_t d = 0; d < N; ++d)
          prod[d] = vals[d * n + i] * vals[d * n + j];
        const double c = pairwise_sum(prod) / static_cast<double>(N);
        emp.at(i, j) = c;
        emp.at(j, i) = c;
      }
    return emp;
  };
  Matrix emp_hidden = empirical(hs);
  Matrix emp_output = empirical(ys);

  double max_z = 0.0;
  std::uint64_t within = 0, entries = 0;
  auto score = [&](const Matrix& emp, const Matrix& ana) {
    for (std::uint64_t i = 0; i < n; ++i)
      for (std::uint64_t j = 0; j < n; ++j) {
        ++entries;
        const double se = std::sqrt(
            (ana.at(i, i) * ana.at(j, j) + ana.at(i, j) * ana.at(i, j)) /
            static_cast<double>(N));
        const double diff = std::fabs(emp.at(i, j) - ana.at(i, j));
        double z;
        if (se > 0.0)
          z = diff / se;
        else
          z = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        max_z = std::max(max_z, z);
        if (z <= 3.0) ++within;
      }
  };
  score(emp_hidden, analytic.hidden);
  score(emp_output, analytic.output);

  return McReport{std::move(analytic.hidden), std::move(analytic.output),
                  std::move(emp_hidden),      std::move(emp_output),
                  max_z,
                  static_cast<double>(within) / static_cast<double>(entries),
                  N,
                  seed};
}

NormBoundReport c_phiphi_norm_bound(const WeightCovariance& cov,
                                    const TreeFunction& h,
                                    const Activation& phi) {
  Matrix c = c_phiphi(cov, h, phi);
  const double hn = l2_norm(h);
  const double bound = phi.lipschitz * phi.lipschitz * hn * hn * cov.kernel_norm();
  const double actual = weighted_kernel_norm(c, haar_weight(cov.p, cov.level));
  if (actual > bound + 1e-10)
    throw NumericError("c_phiphi_norm_bound: bound violated");
  return NormBoundReport{bound, actual};
}

}  // namespace padic
