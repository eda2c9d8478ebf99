#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "padic/solver.hpp"
#include "padic/tree.hpp"

namespace padic {

/// Self-coupled cellular network h(z) = a phi(h(z)) + (W_in * x)(z) + xi(z)
/// with phi the piecewise sigmoid.
struct ToyParams {
  Prime p;
  std::uint32_t level;
  double a;            // self-coupling strength, finite and positive
  TreeFunction w_in;   // convolution kernel
  TreeFunction xi;

  void validate() const;
};

struct DriveField {
  TreeFunction b;  // b(z) = (W_in * x)(z) + xi(z)
};

enum class Label : std::uint8_t { Plus, Minus, Mid };

inline const char* label_name(Label l) {
  switch (l) {
    case Label::Plus: return "PLUS";
    case Label::Minus: return "MINUS";
    default: return "MID";
  }
}

/// A stationary state for a > 1: per-index membership in I_plus, I_minus or
/// the bistability set, plus the induced h.
struct StateLabeling {
  std::vector<Label> labels;
  TreeFunction state;

  /// Empty bistability set: no MID index.
  bool bistable() const;
  /// Count of non-MID indices (the size of I_plus union I_minus).
  std::uint64_t union_size() const;
};

/// Nonnegative big integer, base 1e9 limbs, little-endian.
struct BigCount {
  std::vector<std::uint32_t> limbs;  // empty = 0

  static BigCount one();
  void mul_small(std::uint32_t m);
  bool leq_u64(std::uint64_t cap, std::uint64_t* value_out = nullptr) const;
  std::string to_string() const;
};

struct StatePoset {
  std::vector<StateLabeling> states;
  BigCount count;          // exact total, even when sampled
  bool sampled;            // true when states is a sample, not the full set
  std::vector<bool> minimal;  // filled by minimal_elements on full posets
};

enum class Comparison { LessEq, GreaterEq, Equal, Incomparable };

DriveField drive(const ToyParams& params, const TreeFunction& x);

/// Unique state for a < 1 (branchwise Case_1) or the a = 1 state (Case_2).
TreeFunction closed_form_state(const ToyParams& params, const DriveField& b);

/// All stationary states for a > 1, or an exact count plus a uniform sample
/// of cap labelings when the product count exceeds cap.
StatePoset enumerate_states(const ToyParams& params, const DriveField& b,
                            std::uint64_t cap, std::uint64_t seed = 0);

/// s1 vs s2 under the bistability order: s1 is lower when its non-MID set
/// strictly contains that of s2; equal-union distinct labelings (including
/// distinct bistable states) are incomparable.
Comparison order_relation(const StateLabeling& s1, const StateLabeling& s2);

/// Indices of states with no strictly smaller comparable state; equals the
/// bistable states. Full posets only.
std::vector<std::size_t> minimal_elements(StatePoset& poset);

/// Covering relations (lower, upper) for the Hasse diagram.
std::vector<std::pair<std::size_t, std::size_t>> hasse_edges(
    const StatePoset& poset);

struct LatticeReport {
  std::uint64_t pairs;
  std::uint64_t pairs_with_inf;
  std::uint64_t pairs_with_sup;
};

/// Brute-force check whether every pair of states has an inf/sup inside the
/// enumerated set (reported, not asserted).
LatticeReport lattice_report(const StatePoset& poset);

struct GrayImage {
  std::uint32_t width;
  std::uint32_t height;
  std::vector<std::uint8_t> pixels;  // row-major, maxval 255
};

/// Edge detection in the unique-state regime a <= 1: pixels are scaled to
/// [-1, 1], embedded row-major into D^level, run through the closed form,
/// and phi of the state is mapped back to [0, 255].
GrayImage edge_detect(const GrayImage& image, const ToyParams& params);

/// The equivalent NetworkParams with the diagonal kernel
/// W[I,K] = a p^l delta_{IK}, zero input path and xi = b.
NetworkParams toy_network(const ToyParams& params, const DriveField& b);

}  // namespace padic
