#pragma once

#include <string>
#include <vector>

#include "padic/prior.hpp"
#include "padic/recast.hpp"
#include "padic/solver.hpp"
#include "padic/toy.hpp"
#include "padic/tree.hpp"

namespace padic {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest text with 17 significant digits; used by every emitter so files
/// are byte-stable across runs.
std::string fmt17(double v);

// JSON emitters (two-space indent, LF, deterministic key order).
std::string to_json(const TreeFunction& f);
std::string to_json(const TreeKernel& w);
std::string to_json(const NetworkParams& params);
std::string to_json(const LayeredNet& net);
std::string to_json(const SolveReport& report, double tol);
std::string to_json(const NeuronMap& map);
std::string to_json(const EquivalenceReport& report);
std::string to_json(const McReport& report);

// JSON parsers; IoError carries the parser diagnostics.
TreeFunction tree_function_from_json(const std::string& text);
TreeKernel tree_kernel_from_json(const std::string& text);
NetworkParams network_from_json(const std::string& text);
LayeredNet layered_net_from_json(const std::string& text);
BiasCovariance bias_covariance_from_json(const std::string& text);
WeightCovariance weight_covariance_from_json(const std::string& text);

/// { "W": spec, "W_in": spec, "W_out": spec, "xi": spec, "xi_out": spec,
///   "p": int, "level": int } with weight/bias covariance specs per field.
NetworkPriors priors_from_json(const std::string& text);

// CSV: comma separator, LF line endings, 17 significant digits.
std::string function_csv(const TreeFunction& f);
std::string matrix_csv(const Matrix& m);
std::string states_csv(const StatePoset& poset);
std::string sweep_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

/// Hasse diagram of a fully enumerated poset.
std::string poset_dot(const StatePoset& poset);

// PGM, maxval 255; P2 (ASCII) and P5 (binary) both supported on read,
// selected explicitly on write.
GrayImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GrayImage& image, bool binary);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace padic
