#include "padic/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace padic {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("JSON parse error: ") + e.what());
  }
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw IoError(std::string("missing JSON field: ") + key);
  return *it;
}

std::vector<double> number_list(const json& j, const char* what) {
  if (!j.is_array()) throw IoError(std::string(what) + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw IoError(std::string(what) + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Matrix matrix_from(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw IoError(std::string(what) + ": expected a nonempty matrix");
  Matrix m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::vector<double> row = number_list(j[i], what);
    if (row.size() != m.cols)
      throw IoError(std::string(what) + ": ragged matrix");
    for (std::size_t k = 0; k < row.size(); ++k) m.at(i, k) = row[k];
  }
  return m;
}

void emit_numbers(std::ostringstream& out, const std::vector<double>& v) {
  out << "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    out << fmt17(v[i]);
  }
  out << "]";
}

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_json(const TreeFunction& f) {
  std::ostringstream out;
  out << "{\n  \"p\": " << f.p.value() << ",\n  \"level\": " << f.level
      << ",\n  \"coeffs\": ";
  emit_numbers(out, f.coeffs);
  out << "\n}\n";
  return out.str();
}

std::string to_json(const TreeKernel& w) {
  std::ostringstream out;
  out << "{\n  \"p\": " << w.p.value() << ",\n  \"level\": " << w.level
      << ",\n  \"coeffs\": ";
  emit_numbers(out, w.coeffs);
  out << "\n}\n";
  return out.str();
}

namespace {

std::string inline_json(const std::string& s) {
  // Nested objects are emitted on one line inside composite descriptors.
  std::string out;
  for (char c : s)
    if (c != '\n' && !(c == ' ' && !out.empty() && out.back() == ' '))
      out += c;
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace

std::string to_json(const NetworkParams& params) {
  std::ostringstream out;
  out << "{\n  \"p\": " << params.p.value() << ",\n  \"L\": " << params.levels.L
      << ",\n  \"Delta\": " << params.levels.Delta << ",\n  \"phi\": \""
      << params.phi.name << "\",\n  \"varphi\": \"" << params.varphi.name
      << "\",\n  \"W\": " << inline_json(to_json(params.W))
      << ",\n  \"W_in\": " << inline_json(to_json(params.W_in))
      << ",\n  \"W_out\": " << inline_json(to_json(params.W_out))
      << ",\n  \"xi\": " << inline_json(to_json(params.xi))
      << ",\n  \"xi_out\": " << inline_json(to_json(params.xi_out)) << "\n}\n";
  return out.str();
}

std::string to_json(const LayeredNet& net) {
  std::ostringstream out;
  out << "{\n  \"widths\": [";
  for (std::size_t i = 0; i < net.widths.size(); ++i)
    out << (i ? ", " : "") << net.widths[i];
  out << "],\n  \"weights\": [";
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    out << (l ? ", " : "") << "[";
    for (std::size_t i = 0; i < net.weights[l].size(); ++i) {
      if (i) out << ", ";
      std::ostringstream row;
      emit_numbers(row, net.weights[l][i]);
      out << row.str();
    }
    out << "]";
  }
  out << "],\n  \"biases\": [";
  for (std::size_t l = 0; l < net.biases.size(); ++l) {
    if (l) out << ", ";
    std::ostringstream row;
    emit_numbers(row, net.biases[l]);
    out << row.str();
  }
  out << "],\n  \"phi\": \"" << net.phi.name << "\",\n  \"tied\": "
      << (net.tied ? "true" : "false") << "\n}\n";
  return out.str();
}

std::string to_json(const SolveReport& report, double tol) {
  std::ostringstream out;
  out << "{\n  \"iterations\": " << report.iterations
      << ",\n  \"residual\": " << fmt17(report.residual)
      << ",\n  \"contraction_q\": " << fmt17(report.contraction_q)
      << ",\n  \"stable\": " << (report.stable ? "true" : "false")
      << ",\n  \"converged\": " << (report.converged ? "true" : "false")
      << ",\n  \"norm_bound_ok\": " << (report.norm_bound_ok ? "true" : "false")
      << ",\n  \"tol\": " << fmt17(tol)
      << ",\n  \"state_l2\": " << fmt17(l2_norm(report.state))
      << ",\n  \"output_l2\": " << fmt17(l2_norm(report.output)) << "\n}\n";
  return out.str();
}

std::string to_json(const NeuronMap& map) {
  std::ostringstream out;
  out << "{\n  \"p\": " << map.p.value() << ",\n  \"layers\": [";
  for (std::size_t l = 0; l < map.layer_index.size(); ++l) {
    out << (l ? ", " : "") << "[";
    for (std::size_t i = 0; i < map.layer_index[l].size(); ++i)
      out << (i ? ", " : "") << map.layer_index[l][i];
    out << "]";
  }
  out << "]\n}\n";
  return out.str();
}

std::string to_json(const EquivalenceReport& report) {
  std::ostringstream out;
  out << "{\n  \"max_deviation\": " << fmt17(report.max_deviation)
      << ",\n  \"per_input_max_dev\": ";
  emit_numbers(out, report.per_layer_max_dev);
  out << ",\n  \"nonzero_count_preserved\": "
      << (report.nonzero_count_preserved ? "true" : "false") << "\n}\n";
  return out.str();
}

std::string to_json(const McReport& report) {
  std::ostringstream out;
  out << "{\n  \"max_abs_z\": " << fmt17(report.max_abs_z)
      << ",\n  \"frac_within_3se\": " << fmt17(report.frac_within_3se)
      << ",\n  \"N\": " << report.N << ",\n  \"seed\": " << report.seed
      << "\n}\n";
  return out.str();
}

TreeFunction tree_function_from_json(const std::string& text) {
  json j = parse(text);
  Prime p(field(j, "p").get<std::uint64_t>());
  std::uint32_t level = field(j, "level").get<std::uint32_t>();
  return TreeFunction(p, level, number_list(field(j, "coeffs"), "coeffs"));
}

TreeKernel tree_kernel_from_json(const std::string& text) {
  json j = parse(text);
  Prime p(field(j, "p").get<std::uint64_t>());
  std::uint32_t level = field(j, "level").get<std::uint32_t>();
  return TreeKernel(p, level, number_list(field(j, "coeffs"), "coeffs"));
}

NetworkParams network_from_json(const std::string& text) {
  json j = parse(text);
  Prime p(field(j, "p").get<std::uint64_t>());
  LevelPair levels(field(j, "L").get<std::uint32_t>(),
                   field(j, "Delta").get<std::uint32_t>());
  auto kernel = [&](const char* key) {
    return tree_kernel_from_json(field(j, key).dump());
  };
  auto func = [&](const char* key) {
    return tree_function_from_json(field(j, key).dump());
  };
  NetworkParams params{p,
                       levels,
                       activation_by_name(field(j, "phi").get<std::string>()),
                       activation_by_name(field(j, "varphi").get<std::string>()),
                       kernel("W"),
                       kernel("W_in"),
                       kernel("W_out"),
                       func("xi"),
                       func("xi_out")};
  params.validate();
  return params;
}

LayeredNet layered_net_from_json(const std::string& text) {
  json j = parse(text);
  LayeredNet net{{},
                 {},
                 {},
                 activation_by_name(field(j, "phi").get<std::string>()),
                 j.value("tied", false)};
  for (const auto& w : field(j, "widths"))
    net.widths.push_back(w.get<std::uint32_t>());
  for (const auto& mat : field(j, "weights")) {
    std::vector<std::vector<double>> rows;
    for (const auto& row : mat) rows.push_back(number_list(row, "weights"));
    net.weights.push_back(std::move(rows));
  }
  for (const auto& row : field(j, "biases"))
    net.biases.push_back(number_list(row, "biases"));
  net.validate();
  return net;
}

namespace {

BiasCovariance bias_covariance_from(const json& j, Prime p,
                                    std::uint32_t level) {
  BiasCovariance cov{p, level, matrix_from(field(j, "K"), "bias covariance K")};
  cov.validate();
  return cov;
}

WeightCovariance weight_covariance_from(const json& j, Prime p,
                                        std::uint32_t level) {
  const std::string form = field(j, "form").get<std::string>();
  WeightCovariance cov{p, level, WeightForm::Iid};
  if (form == "iid") {
    cov = WeightCovariance::iid(p, level, field(j, "sigma2").get<double>());
  } else if (form == "separable") {
    cov = WeightCovariance::separable(p, level,
                                      matrix_from(field(j, "A"), "A"),
                                      matrix_from(field(j, "B"), "B"));
  } else if (form == "dense") {
    cov = WeightCovariance::make_dense(
        p, level, number_list(field(j, "K"), "dense covariance K"));
  } else {
    throw IoError("covariance form must be iid, separable or dense");
  }
  cov.validate();
  return cov;
}

}  // namespace

BiasCovariance bias_covariance_from_json(const std::string& text) {
  json j = parse(text);
  return bias_covariance_from(j, Prime(field(j, "p").get<std::uint64_t>()),
                              field(j, "level").get<std::uint32_t>());
}

WeightCovariance weight_covariance_from_json(const std::string& text) {
  json j = parse(text);
  return weight_covariance_from(j, Prime(field(j, "p").get<std::uint64_t>()),
                                field(j, "level").get<std::uint32_t>());
}

NetworkPriors priors_from_json(const std::string& text) {
  json j = parse(text);
  Prime p(field(j, "p").get<std::uint64_t>());
  std::uint32_t level = field(j, "level").get<std::uint32_t>();
  NetworkPriors priors{weight_covariance_from(field(j, "W"), p, level),
                       weight_covariance_from(field(j, "W_in"), p, level),
                       weight_covariance_from(field(j, "W_out"), p, level),
                       bias_covariance_from(field(j, "xi"), p, level),
                       bias_covariance_from(field(j, "xi_out"), p, level)};
  priors.validate();
  return priors;
}

std::string function_csv(const TreeFunction& f) {
  std::ostringstream out;
  out << "index,value\n";
  for (std::size_t i = 0; i < f.coeffs.size(); ++i)
    out << i << "," << fmt17(f.coeffs[i]) << "\n";
  return out.str();
}

std::string matrix_csv(const Matrix& m) {
  std::ostringstream out;
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j)
      out << (j ? "," : "") << fmt17(m.at(i, j));
    out << "\n";
  }
  return out.str();
}

std::string states_csv(const StatePoset& poset) {
  std::ostringstream out;
  out << "state,index,label,value\n";
  for (std::size_t s = 0; s < poset.states.size(); ++s) {
    const auto& st = poset.states[s];
    for (std::size_t i = 0; i < st.labels.size(); ++i)
      out << s << "," << i << "," << label_name(st.labels[i]) << ","
          << fmt17(st.state.coeffs[i]) << "\n";
  }
  return out.str();
}

std::string sweep_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << fmt17(row[i]);
    out << "\n";
  }
  return out.str();
}

std::string poset_dot(const StatePoset& poset) {
  std::ostringstream out;
  out << "digraph hasse {\n  rankdir=BT;\n";
  for (std::size_t s = 0; s < poset.states.size(); ++s) {
    out << "  s" << s << " [label=\"";
    for (Label l : poset.states[s].labels)
      out << (l == Label::Plus ? '+' : l == Label::Minus ? '-' : '0');
    out << "\"];\n";
  }
  for (const auto& [lo, hi] : hasse_edges(poset))
    out << "  s" << lo << " -> s" << hi << ";\n";
  out << "}\n";
  return out.str();
}

namespace {

int next_pgm_token(std::istream& in, std::string& token) {
  token.clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) return 1;
      continue;
    }
    token += static_cast<char>(c);
  }
  return token.empty() ? 0 : 1;
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string tok;
  if (!next_pgm_token(in, tok) || (tok != "P2" && tok != "P5"))
    throw IoError(path + ": not a P2/P5 PGM file");
  const bool binary = tok == "P5";
  auto read_int = [&](const char* what) {
    if (!next_pgm_token(in, tok)) throw IoError(path + ": truncated header");
    try {
      return std::stoul(tok);
    } catch (...) {
      throw IoError(path + ": bad " + what);
    }
  };
  GrayImage img;
  img.width = static_cast<std::uint32_t>(read_int("width"));
  img.height = static_cast<std::uint32_t>(read_int("height"));
  const unsigned long maxval = read_int("maxval");
  if (maxval != 255) throw IoError(path + ": maxval must be 255");
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(n);
  if (binary) {
    // The single whitespace after maxval was already consumed by the tokenizer.
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
      throw IoError(path + ": truncated pixel data");
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      unsigned long v = read_int("pixel");
      if (v > 255) throw IoError(path + ": pixel out of range");
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

void write_pgm(const std::string& path, const GrayImage& image, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << (binary ? "P5" : "P2") << "\n"
      << image.width << " " << image.height << "\n255\n";
  if (binary) {
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
  } else {
    for (std::uint32_t r = 0; r < image.height; ++r) {
      for (std::uint32_t c = 0; c < image.width; ++c)
        out << (c ? " " : "")
            << static_cast<unsigned>(image.pixels[r * image.width + c]);
      out << "\n";
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace padic
