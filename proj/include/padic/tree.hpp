#pragma once

#include <cstdint>
#include <vector>

#include "padic/activation.hpp"
#include "padic/core.hpp"

namespace padic {

/// An element of D^l(Z_p): coeffs[i] is the value on the ball i + p^l Z_p,
/// indices in increasing value order.
struct TreeFunction {
  Prime p;
  std::uint32_t level;
  std::vector<double> coeffs;

  TreeFunction(Prime prime, std::uint32_t l, std::vector<double> c);
  static TreeFunction constant(Prime p, std::uint32_t l, double value);
  static TreeFunction zero(Prime p, std::uint32_t l) {
    return constant(p, l, 0.0);
  }

  std::uint64_t size() const { return coeffs.size(); }
};

/// An element of D^l(Z_p x Z_p): p^l x p^l coefficient matrix, row = first
/// argument, column = second argument, row-major storage.
struct TreeKernel {
  Prime p;
  std::uint32_t level;
  std::vector<double> coeffs;  // side * side, row-major

  TreeKernel(Prime prime, std::uint32_t l, std::vector<double> c);
  static TreeKernel constant(Prime p, std::uint32_t l, double value);
  static TreeKernel zero(Prime p, std::uint32_t l) {
    return constant(p, l, 0.0);
  }

  std::uint64_t side() const;
  double& at(std::uint64_t i, std::uint64_t k) {
    return coeffs[i * side() + k];
  }
  double at(std::uint64_t i, std::uint64_t k) const {
    return coeffs[i * side() + k];
  }
};

// Level lifting: the canonical embedding D^l into D^{l2}; coefficients are
// pulled back through the projection Lambda_{l2,l}.
TreeFunction lift(const TreeFunction& f, std::uint32_t l2,
                  std::uint64_t cap = kDefaultLevelCap);
TreeKernel lift(const TreeKernel& w, std::uint32_t l2,
                std::uint64_t cap = kDefaultLevelCap);

// Exact Haar-measure quadrature: p^{-l} * sum of coefficients.
double integrate(const TreeFunction& f);

double l2_norm(const TreeFunction& f);
double inner(const TreeFunction& f, const TreeFunction& g);

/// sqrt(p^{-2l} * sum of squared entries).
double kernel_l2_norm(const TreeKernel& w);

/// Z(I) = p^{-l} sum_K W(I,K) g(Lambda(K)); g at a lower level is lifted,
/// g above the kernel level is rejected.
TreeFunction apply_kernel(const TreeKernel& w, const TreeFunction& g);

TreeFunction apply_activation(const Activation& phi, const TreeFunction& f);

/// Group convolution over G_l: result[i] = p^{-l} sum_k kernel[(i-k) mod p^l] x[k].
TreeFunction convolve(const TreeFunction& kernel, const TreeFunction& x);

/// Layered digit-recursive evaluation of sum_K F(K); agrees with the flat sum.
double tree_sum(const TreeFunction& f, std::uint32_t base_level);

TreeFunction add(const TreeFunction& a, const TreeFunction& b);
TreeFunction sub(const TreeFunction& a, const TreeFunction& b);
TreeFunction scale(const TreeFunction& f, double s);

}  // namespace padic
