#include "padic/recast.hpp"

#include <algorithm>
#include <cmath>

namespace padic {

void LayeredNet::validate() const {
  if (widths.size() != weights.size() + 1 || biases.size() != weights.size())
    throw DomainError("LayeredNet: widths/weights/biases size mismatch");
  if (weights.empty()) throw DomainError("LayeredNet: at least one layer");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (widths[l] < 1 || widths[l + 1] < 1)
      throw DomainError("LayeredNet: zero width");
    if (weights[l].size() != widths[l + 1] ||
        biases[l].size() != widths[l + 1])
      throw DomainError("LayeredNet: shape mismatch at layer " +
                        std::to_string(l + 1));
    for (const auto& row : weights[l])
      if (row.size() != widths[l])
        throw DomainError("LayeredNet: row length mismatch");
  }
  if (tied) {
    for (std::size_t l = 0; l + 1 < widths.size(); ++l)
      if (widths[l] != widths[0])
        throw DomainError("LayeredNet: tied requires equal widths");
    for (std::size_t l = 1; l < weights.size(); ++l)
      if (weights[l] != weights[0])
        throw DomainError("LayeredNet: tied requires identical matrices");
  }
}

std::vector<std::vector<double>> LayeredNet::forward(
    const std::vector<double>& input) const {
  if (input.size() != widths[0])
    throw DomainError("LayeredNet::forward: input size mismatch");
  std::vector<std::vector<double>> layers;
  std::vector<double> prev = input;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    std::vector<double> act(prev.size());
    for (std::size_t k = 0; k < prev.size(); ++k) act[k] = phi.eval(prev[k]);
    std::vector<double> h(widths[l + 1]);
    for (std::size_t i = 0; i < h.size(); ++i) {
      double s = biases[l][i];
      for (std::size_t k = 0; k < act.size(); ++k)
        s += weights[l][i][k] * act[k];
      h[i] = s;
    }
    layers.push_back(h);
    prev = std::move(h);
  }
  return layers;
}

std::vector<std::vector<double>> direct_sum(
    const std::vector<std::vector<std::vector<double>>>& matrices) {
  if (matrices.empty()) throw DomainError("direct_sum: empty list");
  std::size_t rows = 0, cols = 0;
  for (const auto& m : matrices) {
    rows += m.size();
    cols += m.empty() ? 0 : m[0].size();
  }
  std::vector<std::vector<double>> out(rows, std::vector<double>(cols, 0.0));
  std::size_t r0 = 0, c0 = 0;
  for (const auto& m : matrices) {
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m[i].size(); ++j) out[r0 + i][c0 + j] = m[i][j];
    r0 += m.size();
    c0 += m.empty() ? 0 : m[0].size();
  }
  return out;
}

std::uint64_t smallest_admissible_prime(const LayeredNet& net) {
  std::uint32_t max_w = *std::max_element(net.widths.begin(), net.widths.end());
  std::uint64_t p = max_w + 1;
  while (!Prime::is_prime(p)) ++p;
  return p;
}

NeuronMap build_neuron_map(const LayeredNet& net, const Prime& p) {
  net.validate();
  std::uint32_t max_w = *std::max_element(net.widths.begin(), net.widths.end());
  if (p.value() <= max_w)
    throw DomainError("build_neuron_map: p must exceed the maximum width; "
                      "smallest admissible prime is " +
                      std::to_string(smallest_admissible_prime(net)));

  NeuronMap map{p, {}};
  map.layer_index.resize(net.widths.size());

  // Input layer: the inclusion k -> k into G_1.
  map.layer_index[0].resize(net.widths[0]);
  for (std::uint32_t k = 1; k <= net.widths[0]; ++k)
    map.layer_index[0][k - 1] = k;

  for (std::uint32_t j = 1; j < net.widths.size(); ++j) {
    const auto& W = net.weights[j - 1];
    std::uint64_t pj = pow_checked(p.value(), j);
    map.layer_index[j].resize(net.widths[j]);
    for (std::uint32_t i = 1; i <= net.widths[j]; ++i) {
      // Parent: nonzero predecessor with largest |W|, ties to smallest k;
      // all-zero rows keep k = 1 so the map stays total.
      std::uint32_t parent = 1;
      double best = -1.0;
      for (std::uint32_t k = 1; k <= net.widths[j - 1]; ++k) {
        double w = std::fabs(W[i - 1][k - 1]);
        if (w != 0.0 && w > best) {
          best = w;
          parent = k;
        }
      }
      map.layer_index[j][i - 1] =
          map.layer_index[j - 1][parent - 1] + static_cast<std::uint64_t>(i) * pj;
    }
  }
  return map;
}

RecastResult recast(const LayeredNet& net, const Prime& p) {
  NeuronMap map = build_neuron_map(net, p);
  const std::uint32_t depth = net.depth();
  const std::uint32_t level = depth + 1;
  const std::uint64_t n = pow_checked(p.value(), level);
  const double scale = static_cast<double>(n);  // p^level

  TreeKernel W = TreeKernel::zero(p, level);
  TreeFunction xi = TreeFunction::zero(p, level);
  std::uint64_t nnz = 0;
  for (std::uint32_t j = 1; j <= depth; ++j) {
    const auto& src = net.weights[j - 1];
    for (std::uint32_t i = 1; i <= net.widths[j]; ++i) {
      const std::uint64_t I = map.at(j, i);
      for (std::uint32_t k = 1; k <= net.widths[j - 1]; ++k) {
        double w = src[i - 1][k - 1];
        if (w != 0.0) {
          W.at(I, map.at(j - 1, k)) = scale * w;
          ++nnz;
        }
      }
      xi.coeffs[I] = net.biases[j - 1][i - 1];
    }
  }

  NetworkParams params{p,
                       LevelPair(1, depth),
                       net.phi,
                       make_identity(),
                       std::move(W),
                       TreeKernel::zero(p, 1),
                       TreeKernel::zero(p, level),
                       std::move(xi),
                       TreeFunction::zero(p, level)};
  return RecastResult{std::move(params), std::move(map), nnz, level};
}

std::vector<std::vector<double>> recast_forward(
    const RecastResult& result, const LayeredNet& net,
    const std::vector<double>& input) {
  const auto& map = result.neuron_map;
  const Prime p = result.params.p;
  const std::uint32_t level = result.tree_level;
  if (input.size() != net.widths[0])
    throw DomainError("recast_forward: input size mismatch");

  TreeFunction h = TreeFunction::zero(p, level);
  for (std::uint32_t k = 1; k <= net.widths[0]; ++k)
    h.coeffs[map.at(0, k)] = input[k - 1];

  std::vector<std::vector<double>> layers;
  for (std::uint32_t j = 1; j <= net.depth(); ++j) {
    TreeFunction z = add(
        apply_kernel(result.params.W, apply_activation(net.phi, h)),
        result.params.xi);
    // Stage mask: keep only the pre-activations of the layer just computed.
    TreeFunction masked = TreeFunction::zero(p, level);
    std::vector<double> read(net.widths[j]);
    for (std::uint32_t i = 1; i <= net.widths[j]; ++i) {
      const std::uint64_t I = map.at(j, i);
      masked.coeffs[I] = z.coeffs[I];
      read[i - 1] = z.coeffs[I];
    }
    layers.push_back(std::move(read));
    h = std::move(masked);
  }
  return layers;
}

EquivalenceReport verify_equivalence(
    const LayeredNet& net, const RecastResult& result,
    const std::vector<std::vector<double>>& inputs) {
  EquivalenceReport rep{{}, 0.0, false};
  for (const auto& x : inputs) {
    auto ref = net.forward(x);
    auto got = recast_forward(result, net, x);
    double dev = 0.0;
    for (std::size_t l = 0; l < ref.size(); ++l)
      for (std::size_t i = 0; i < ref[l].size(); ++i)
        dev = std::max(dev, std::fabs(ref[l][i] - got[l][i]));
    rep.per_layer_max_dev.push_back(dev);
    rep.max_deviation = std::max(rep.max_deviation, dev);
  }
  std::uint64_t kernel_nnz = 0;
  for (double v : result.params.W.coeffs)
    if (v != 0.0) ++kernel_nnz;
  rep.nonzero_count_preserved = kernel_nnz == result.nonzero_count;
  return rep;
}

}  // namespace padic
