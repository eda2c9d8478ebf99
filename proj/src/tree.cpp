#include "padic/tree.hpp"

#include <cmath>
#include <stdexcept>

#include "padic/reduce.hpp"
#include "padic/threading.hpp"

namespace padic {

namespace {

void require_finite(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite entry");
}

void require_same_prime(const Prime& a, const Prime& b) {
  if (!(a == b)) throw DomainError("mismatched primes");
}

}  // namespace

TreeFunction::TreeFunction(Prime prime, std::uint32_t l, std::vector<double> c)
    : p(prime), level(l), coeffs(std::move(c)) {
  if (coeffs.size() != pow_checked(p.value(), level))
    throw DomainError("TreeFunction: coeffs length != p^level");
  require_finite(coeffs, "TreeFunction");
}

TreeFunction TreeFunction::constant(Prime p, std::uint32_t l, double value) {
  return TreeFunction(p, l,
                      std::vector<double>(pow_checked(p.value(), l), value));
}

TreeKernel::TreeKernel(Prime prime, std::uint32_t l, std::vector<double> c)
    : p(prime), level(l), coeffs(std::move(c)) {
  std::uint64_t n = pow_checked(p.value(), level);
  if (coeffs.size() != n * n)
    throw DomainError("TreeKernel: coeffs size != p^level squared");
  require_finite(coeffs, "TreeKernel");
}

TreeKernel TreeKernel::constant(Prime p, std::uint32_t l, double value) {
  std::uint64_t n = pow_checked(p.value(), l);
  return TreeKernel(p, l, std::vector<double>(n * n, value));
}

std::uint64_t TreeKernel::side() const {
  return pow_checked(p.value(), level);
}

TreeFunction lift(const TreeFunction& f, std::uint32_t l2, std::uint64_t cap) {
  if (l2 < f.level) throw DomainError("lift: target level below source");
  if (l2 == f.level) return f;
  std::uint64_t n2 = pow_checked(f.p.value(), l2, cap);
  std::uint64_t n1 = f.coeffs.size();
  std::vector<double> out(n2);
  for (std::uint64_t v = 0; v < n2; ++v) out[v] = f.coeffs[v % n1];
  return TreeFunction(f.p, l2, std::move(out));
}

TreeKernel lift(const TreeKernel& w, std::uint32_t l2, std::uint64_t cap) {
  if (l2 < w.level) throw DomainError("lift: target level below source");
  if (l2 == w.level) return w;
  std::uint64_t n2 = pow_checked(w.p.value(), l2, cap);
  std::uint64_t n1 = w.side();
  std::vector<double> out(n2 * n2);
  for (std::uint64_t i = 0; i < n2; ++i)
    for (std::uint64_t k = 0; k < n2; ++k)
      out[i * n2 + k] = w.coeffs[(i % n1) * n1 + (k % n1)];
  return TreeKernel(w.p, l2, std::move(out));
}

double integrate(const TreeFunction& f) {
  return haar_weight(f.p, f.level) * pairwise_sum(f.coeffs);
}

double l2_norm(const TreeFunction& f) {
  std::vector<double> sq(f.coeffs.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = f.coeffs[i] * f.coeffs[i];
  return std::sqrt(haar_weight(f.p, f.level) * pairwise_sum(sq));
}

double inner(const TreeFunction& f, const TreeFunction& g) {
  require_same_prime(f.p, g.p);
  std::uint32_t l = std::max(f.level, g.level);
  const TreeFunction fl = lift(f, l);
  const TreeFunction gl = lift(g, l);
  std::vector<double> prod(fl.coeffs.size());
  for (std::size_t i = 0; i < prod.size(); ++i)
    prod[i] = fl.coeffs[i] * gl.coeffs[i];
  return haar_weight(f.p, l) * pairwise_sum(prod);
}

double kernel_l2_norm(const TreeKernel& w) {
  std::vector<double> sq(w.coeffs.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = w.coeffs[i] * w.coeffs[i];
  double hw = haar_weight(w.p, w.level);
  return std::sqrt(hw * hw * pairwise_sum(sq));
}

TreeFunction apply_kernel(const TreeKernel& w, const TreeFunction& g) {
  require_same_prime(w.p, g.p);
  if (g.level > w.level)
    throw DomainError("apply_kernel: argument level above kernel level");
  const TreeFunction gl = lift(g, w.level);
  const std::uint64_t n = w.side();
  const double hw = haar_weight(w.p, w.level);
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> row(n);
    const double* wr = &w.coeffs[i * n];
    for (std::uint64_t k = 0; k < n; ++k) row[k] = wr[k] * gl.coeffs[k];
    out[i] = hw * pairwise_sum(row);
  });
  return TreeFunction(w.p, w.level, std::move(out));
}

TreeFunction apply_activation(const Activation& phi, const TreeFunction& f) {
  std::vector<double> out(f.coeffs.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = phi.eval(f.coeffs[i]);
  return TreeFunction(f.p, f.level, std::move(out));
}

TreeFunction convolve(const TreeFunction& kernel, const TreeFunction& x) {
  require_same_prime(kernel.p, x.p);
  std::uint32_t l = std::max(kernel.level, x.level);
  const TreeFunction kl = lift(kernel, l);
  const TreeFunction xl = lift(x, l);
  const std::uint64_t n = kl.coeffs.size();
  const double hw = haar_weight(kernel.p, l);
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> terms(n);
    for (std::uint64_t k = 0; k < n; ++k)
      terms[k] = kl.coeffs[(i + n - k) % n] * xl.coeffs[k];
    out[i] = hw * pairwise_sum(terms);
  });
  return TreeFunction(kernel.p, l, std::move(out));
}

namespace {

// Sum of F over the descendants of a fixed level-base prefix, recursing on
// the top digit first.
double tree_sum_rec(const TreeFunction& f, std::uint32_t level,
                    std::uint64_t prefix) {
  if (level == f.level) return f.coeffs[prefix];
  std::uint64_t block = pow_checked(f.p.value(), level);
  double s = 0.0;
  for (std::uint64_t d = 0; d < f.p.value(); ++d)
    s += tree_sum_rec(f, level + 1, prefix + d * block);
  return s;
}

}  // namespace

double tree_sum(const TreeFunction& f, std::uint32_t base_level) {
  if (base_level > f.level) throw DomainError("tree_sum: base level above f");
  std::uint64_t nb = pow_checked(f.p.value(), base_level);
  double s = 0.0;
  for (std::uint64_t v = 0; v < nb; ++v) s += tree_sum_rec(f, base_level, v);
  return s;
}

TreeFunction add(const TreeFunction& a, const TreeFunction& b) {
  require_same_prime(a.p, b.p);
  std::uint32_t l = std::max(a.level, b.level);
  TreeFunction al = lift(a, l), bl = lift(b, l);
  for (std::size_t i = 0; i < al.coeffs.size(); ++i)
    al.coeffs[i] += bl.coeffs[i];
  return al;
}

TreeFunction sub(const TreeFunction& a, const TreeFunction& b) {
  return add(a, scale(b, -1.0));
}

TreeFunction scale(const TreeFunction& f, double s) {
  TreeFunction out = f;
  for (double& x : out.coeffs) x *= s;
  return out;
}

}  // namespace padic
