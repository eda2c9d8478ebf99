#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "padic/io.hpp"
#include "padic/rng.hpp"
#include "padic/threading.hpp"

namespace {

using namespace padic;

int run_solve(const std::string& network_path, const std::string& input_path,
              double tol, std::uint64_t max_iter, const std::string& out_report,
              const std::string& out_state) {
  NetworkParams params = network_from_json(read_file(network_path));
  TreeFunction x = input_path.empty()
                       ? TreeFunction::zero(params.p, params.levels.L)
                       : tree_function_from_json(read_file(input_path));
  SolveReport report = solve(params, x, tol, max_iter);
  std::string report_json = to_json(report, tol);
  if (!out_report.empty()) write_file(out_report, report_json);
  if (!out_state.empty()) write_file(out_state, function_csv(report.state));
  std::cout << report_json;
  return report.stable && report.converged ? 0 : 2;
}

int run_recast(const std::string& net_path, std::uint64_t p_opt,
               std::uint64_t probes, std::uint64_t seed,
               const std::string& out_params, const std::string& out_map,
               const std::string& out_report) {
  LayeredNet net = layered_net_from_json(read_file(net_path));
  const std::uint64_t p_val = p_opt ? p_opt : smallest_admissible_prime(net);
  RecastResult result = recast(net, Prime(p_val));

  std::vector<std::vector<double>> inputs;
  for (std::uint64_t i = 0; i < probes; ++i) {
    CounterRng rng(seed, i);
    std::vector<double> x(net.widths[0]);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    inputs.push_back(std::move(x));
  }
  EquivalenceReport report = verify_equivalence(net, result, inputs);

  if (!out_params.empty()) write_file(out_params, to_json(result.params));
  if (!out_map.empty()) write_file(out_map, to_json(result.neuron_map));
  std::string report_json = to_json(report);
  if (!out_report.empty()) write_file(out_report, report_json);
  std::cout << report_json;
  return 0;
}

int run_edges(const std::string& image_path, double a,
              const std::string& kernel_path, const std::string& xi_path,
              std::uint32_t level, const std::string& out_path, bool binary) {
  GrayImage image = read_pgm(image_path);
  TreeFunction w_in = tree_function_from_json(read_file(kernel_path));
  TreeFunction xi = xi_path.empty()
                        ? TreeFunction::zero(w_in.p, level)
                        : tree_function_from_json(read_file(xi_path));
  ToyParams params{w_in.p, level, a, std::move(w_in), std::move(xi)};
  GrayImage out = edge_detect(image, params);
  write_pgm(out_path, out, binary);
  std::cout << "{\n  \"width\": " << out.width
            << ",\n  \"height\": " << out.height << ",\n  \"a\": " << fmt17(a)
            << "\n}\n";
  return 0;
}

int run_states(double a, const std::string& drive_path, std::uint64_t cap,
               std::uint64_t seed, const std::string& out_states,
               const std::string& out_dot) {
  TreeFunction b = tree_function_from_json(read_file(drive_path));
  ToyParams params{b.p, b.level, a, TreeFunction::zero(b.p, b.level),
                   TreeFunction::zero(b.p, b.level)};
  StatePoset poset = enumerate_states(params, DriveField{b}, cap, seed);
  std::int64_t minimal_count = -1;
  if (!poset.sampled && !poset.states.empty())
    minimal_count = static_cast<std::int64_t>(minimal_elements(poset).size());
  if (!out_states.empty()) write_file(out_states, states_csv(poset));
  if (!out_dot.empty() && !poset.sampled)
    write_file(out_dot, poset_dot(poset));
  std::cout << "{\n  \"count\": \"" << poset.count.to_string()
            << "\",\n  \"sampled\": " << (poset.sampled ? "true" : "false")
            << ",\n  \"states_returned\": " << poset.states.size()
            << ",\n  \"minimal_count\": " << minimal_count << "\n}\n";
  return 0;
}

int run_sweep(const std::string& network_path, const std::string& param,
              double from, double to, std::uint64_t steps,
              const std::string& input_path, double tol, std::uint64_t max_iter,
              const std::string& out_path) {
  if (param != "W_scale")
    throw DomainError("sweep: unsupported --param (supported: W_scale)");
  NetworkParams base = network_from_json(read_file(network_path));
  TreeFunction x = input_path.empty()
                       ? TreeFunction::zero(base.p, base.levels.L)
                       : tree_function_from_json(read_file(input_path));
  std::vector<std::vector<double>> rows;
  for (std::uint64_t k = 0; k < steps; ++k) {
    const double t = steps > 1
                         ? static_cast<double>(k) / static_cast<double>(steps - 1)
                         : 0.0;
    const double value = from + (to - from) * t;
    NetworkParams params = base;
    for (double& w : params.W.coeffs) w *= value;
    SolveReport report = solve(params, x, tol, max_iter);
    rows.push_back({value, report.contraction_q,
                    report.stable ? 1.0 : 0.0,
                    static_cast<double>(report.iterations), report.residual,
                    l2_norm(report.state)});
  }
  std::string csv = sweep_csv(
      {"param", "q", "stable", "iterations", "residual", "state_norm"}, rows);
  if (!out_path.empty()) write_file(out_path, csv);
  std::cout << csv;
  return 0;
}

int run_prior(const std::string& priors_path, const std::string& h_path,
              const std::string& x_path, const std::string& phi_name,
              const std::string& varphi_name, std::uint64_t N,
              std::uint64_t seed, const std::string& out_hidden,
              const std::string& out_output, const std::string& out_report) {
  NetworkPriors priors = priors_from_json(read_file(priors_path));
  TreeFunction h = tree_function_from_json(read_file(h_path));
  TreeFunction x = x_path.empty()
                       ? TreeFunction::zero(priors.w.p, priors.w.level)
                       : tree_function_from_json(read_file(x_path));
  McReport report = mc_validate(priors, h, x, activation_by_name(phi_name),
                                activation_by_name(varphi_name), N, seed);
  if (!out_hidden.empty()) write_file(out_hidden, matrix_csv(report.analytic_hidden));
  if (!out_output.empty()) write_file(out_output, matrix_csv(report.analytic_output));
  std::string report_json = to_json(report);
  if (!out_report.empty()) write_file(out_report, report_json);
  std::cout << report_json;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-adic deep neural network toolkit"};
  app.require_subcommand(1);
  int threads = 1;
  std::uint64_t seed = 0;
  app.add_option("--threads", threads, "worker thread cap")->capture_default_str();
  app.add_option("--seed", seed, "seed for all randomness")->capture_default_str();

  std::string network_path, input_path, out_report, out_state;
  double tol = 1e-10;
  std::uint64_t max_iter = 100000;
  auto* solve_cmd = app.add_subcommand("solve", "solve the hidden-state fixed point");
  solve_cmd->add_option("--network", network_path)->required();
  solve_cmd->add_option("--input", input_path);
  solve_cmd->add_option("--tol", tol)->capture_default_str();
  solve_cmd->add_option("--max-iter", max_iter)->capture_default_str();
  solve_cmd->add_option("--out-report", out_report);
  solve_cmd->add_option("--out-state", out_state);

  std::string net_path, out_params, out_map;
  std::uint64_t p_opt = 0, probes = 5;
  auto* recast_cmd = app.add_subcommand("recast", "recast a layered net into tree form");
  recast_cmd->add_option("--net", net_path)->required();
  recast_cmd->add_option("--p", p_opt, "prime (default: smallest admissible)");
  recast_cmd->add_option("--probes", probes)->capture_default_str();
  recast_cmd->add_option("--out-params", out_params);
  recast_cmd->add_option("--out-map", out_map);
  recast_cmd->add_option("--out-report", out_report);

  std::string image_path, kernel_path, xi_path, out_image;
  double a = 0.5;
  std::uint32_t level = 0;
  bool binary = false;
  auto* edges_cmd = app.add_subcommand("edges", "edge-detect a grayscale image");
  edges_cmd->add_option("--image", image_path)->required();
  edges_cmd->add_option("--a", a)->capture_default_str();
  edges_cmd->add_option("--kernel", kernel_path)->required();
  edges_cmd->add_option("--xi", xi_path);
  edges_cmd->add_option("--level", level)->required();
  edges_cmd->add_option("--out", out_image)->required();
  edges_cmd->add_flag("--binary", binary, "write P5 instead of P2");

  std::string drive_path, out_states, out_dot;
  std::uint64_t cap = 1000000;
  auto* states_cmd = app.add_subcommand("states", "enumerate stationary states (a > 1)");
  states_cmd->add_option("--a", a)->required();
  states_cmd->add_option("--drive", drive_path)->required();
  states_cmd->add_option("--cap", cap)->capture_default_str();
  states_cmd->add_option("--out-states", out_states);
  states_cmd->add_option("--out-dot", out_dot);

  std::string param = "W_scale", out_csv;
  double from = 0.0, to = 1.0;
  std::uint64_t steps = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep with stability diagnostics");
  sweep_cmd->add_option("--network", network_path)->required();
  sweep_cmd->add_option("--param", param)->capture_default_str();
  sweep_cmd->add_option("--from", from)->required();
  sweep_cmd->add_option("--to", to)->required();
  sweep_cmd->add_option("--steps", steps)->required();
  sweep_cmd->add_option("--input", input_path);
  sweep_cmd->add_option("--tol", tol)->capture_default_str();
  sweep_cmd->add_option("--max-iter", max_iter)->capture_default_str();
  sweep_cmd->add_option("--out", out_csv);

  std::string priors_path, h_path, x_path, phi_name = "tanh",
              varphi_name = "tanh", out_hidden, out_output;
  std::uint64_t mc_n = 100000;
  auto* prior_cmd = app.add_subcommand("prior", "analytic prior covariance with MC validation");
  prior_cmd->add_option("--priors", priors_path)->required();
  prior_cmd->add_option("--hidden", h_path)->required();
  prior_cmd->add_option("--x", x_path);
  prior_cmd->add_option("--phi", phi_name)->capture_default_str();
  prior_cmd->add_option("--varphi", varphi_name)->capture_default_str();
  prior_cmd->add_option("--N", mc_n)->capture_default_str();
  prior_cmd->add_option("--out-hidden", out_hidden);
  prior_cmd->add_option("--out-output", out_output);
  prior_cmd->add_option("--out-report", out_report);

  CLI11_PARSE(app, argc, argv);
  padic::set_max_threads(threads);

  try {
    if (solve_cmd->parsed())
      return run_solve(network_path, input_path, tol, max_iter, out_report,
                       out_state);
    if (recast_cmd->parsed())
      return run_recast(net_path, p_opt, probes, seed, out_params, out_map,
                        out_report);
    if (edges_cmd->parsed())
      return run_edges(image_path, a, kernel_path, xi_path, level, out_image,
                       binary);
    if (states_cmd->parsed())
      return run_states(a, drive_path, cap, seed, out_states, out_dot);
    if (sweep_cmd->parsed())
      return run_sweep(network_path, param, from, to, steps, input_path, tol,
                       max_iter, out_csv);
    if (prior_cmd->parsed())
      return run_prior(priors_path, h_path, x_path, phi_name, varphi_name,
                       mc_n, seed, out_hidden, out_output, out_report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
