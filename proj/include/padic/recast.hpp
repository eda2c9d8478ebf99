#pragma once

#include <cstdint>
#include <vector>

#include "padic/solver.hpp"
#include "padic/tree.hpp"

namespace padic {

/// An ordinary layered feedforward net h^(l) = W^(l) phi(h^(l-1)) + xi^(l),
/// l = 1..Delta, with input width widths[0] and Delta weight matrices.
struct LayeredNet {
  std::vector<std::uint32_t> widths;                // n_L .. n_{L+Delta}
  std::vector<std::vector<std::vector<double>>> weights;  // weights[l]: n_{l+1} x n_l
  std::vector<std::vector<double>> biases;          // biases[l]: n_{l+1}
  Activation phi;
  bool tied = false;  // RNN weight tying: equal widths, identical matrices

  std::uint32_t depth() const {
    return static_cast<std::uint32_t>(weights.size());
  }
  void validate() const;

  /// Pre-activations per layer (h^(1)..h^(Delta)) for one input vector.
  std::vector<std::vector<double>> forward(
      const std::vector<double>& input) const;
};

/// Per-layer injective neuron addressing: layer j (0-based, 0 = input)
/// maps neuron i (1-based) to an index value in G_{j+1}.
struct NeuronMap {
  Prime p;
  std::vector<std::vector<std::uint64_t>> layer_index;  // [layer][i-1] -> value

  std::uint64_t at(std::uint32_t layer, std::uint32_t neuron_1based) const {
    return layer_index[layer][neuron_1based - 1];
  }
};

struct RecastResult {
  NetworkParams params;      // W_in = 0; xi from the direct sum
  NeuronMap neuron_map;
  std::uint64_t nonzero_count;
  std::uint32_t tree_level;  // Delta + 1 digit levels
};

struct EquivalenceReport {
  std::vector<double> per_layer_max_dev;  // one entry per input, max over layers
  double max_deviation;
  bool nonzero_count_preserved;
};

/// Block-diagonal direct sum, blocks in the given order.
std::vector<std::vector<double>> direct_sum(
    const std::vector<std::vector<std::vector<double>>>& matrices);

std::uint64_t smallest_admissible_prime(const LayeredNet& net);

NeuronMap build_neuron_map(const LayeredNet& net, const Prime& p);

RecastResult recast(const LayeredNet& net, const Prime& p);

/// Forward pass of the recast network: Delta masked applications of the
/// single tree kernel; returns pre-activations read back at mapped indices.
std::vector<std::vector<double>> recast_forward(
    const RecastResult& result, const LayeredNet& net,
    const std::vector<double>& input);

EquivalenceReport verify_equivalence(
    const LayeredNet& net, const RecastResult& result,
    const std::vector<std::vector<double>>& inputs);

}  // namespace padic
