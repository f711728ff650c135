// Command-line front end: reproduce the steering-verification sweeps, run the
// self-testing SDP, and simulate or verify photon-count records.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "steerdi/io.hpp"
#include "steerdi/lhs.hpp"

using namespace steerdi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

std::string fmt10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// flags win over config-file values: only options the user did not pass on the
// command line are overwritten from the JSON config
void apply_config(CLI::App& app, const std::string& path) {
  if (path.empty()) return;
  const json cfg = read_json_file(path);
  std::vector<CLI::App*> scopes{&app};
  for (CLI::App* sub : app.get_subcommands()) scopes.push_back(sub);
  for (const auto& [key, value] : cfg.items()) {
    for (CLI::App* scope : scopes) {
      CLI::Option* opt = scope->get_option_no_throw("--" + key);
      if (opt == nullptr || opt->count() > 0) continue;
      if (value.is_array())
        for (const auto& v : value) opt->add_result(v.is_string() ? v.get<std::string>() : v.dump());
      else
        opt->add_result(value.is_string() ? value.get<std::string>() : value.dump());
      opt->run_callback();
    }
  }
}

std::array<double, 3> triple_from(const std::vector<double>& v, const char* what) {
  if (v.size() != 3) throw std::invalid_argument(std::string(what) + ": need exactly three values");
  return {v[0], v[1], v[2]};
}

bool bound_usable(const SelfTestBound& b) {
  return b.primal_residual < 1e-5 && b.gap < 1e-3;
}

std::array<double, 3> fidelities_from_sdp(const std::array<double, 3>& chsh) {
  std::array<double, 3> f{};
  for (int j = 1; j <= 3; ++j) {
    const auto b = fidelity_lower_bound(
        chsh, j == 1 ? SwapObjective::f1 : (j == 2 ? SwapObjective::f2 : SwapObjective::f3));
    if (!bound_usable(b)) throw std::runtime_error("self-testing SDP did not converge");
    f[static_cast<size_t>(j - 1)] = std::clamp(b.value, 0.0, 1.0);
  }
  return f;
}

int cmd_reproduce_fig3(const std::vector<double>& grid, const std::vector<double>& fid_flag,
                       const std::vector<double>& chsh_flag, long long budget, std::uint64_t seed,
                       int resamples, const std::string& out, const std::string& format) {
  std::vector<double> vs = grid;
  if (vs.empty()) vs = {0.6469, 0.6742, 0.7015, 0.8090, 0.9239, 0.9951};
  for (size_t i = 0; i < vs.size(); ++i) {
    if (vs[i] < 0 || vs[i] > 1) throw std::invalid_argument("--v-grid: visibility outside [0,1]");
    if (i > 0 && vs[i] <= vs[i - 1]) throw std::invalid_argument("--v-grid: must be strictly increasing");
  }

  std::array<double, 3> f{1, 1, 1};
  if (!fid_flag.empty())
    f = triple_from(fid_flag, "--fidelities");
  else if (!chsh_flag.empty())
    f = fidelities_from_sdp(triple_from(chsh_flag, "--chsh"));
  require_fidelities(f, "reproduce-fig3");

  const std::array<double, 3> ideal{1, 1, 1};
  json rows = json::array();
  std::ostringstream csv;
  csv << "v,payoff_ideal,payoff_noisy,chsh_value";
  if (budget > 0) csv << ",payoff_stderr";
  csv << "\n";

  for (double v : vs) {
    ProtocolConfig cfg;
    cfg.visibility = v;
    double payoff_ideal, payoff_noisy;
    std::optional<double> se;
    if (budget > 0) {
      SamplingBudget b;
      b.steer_per_setting = budget;
      b.chsh_per_line = budget;
      const CountsRecord rec = sample_counts(cfg, b, seed);
      const Behavior est = estimate_behavior(rec);
      payoff_ideal = payoff_eq7(est, ideal).value;
      const auto boot = bootstrap_witness(rec, f, resamples, seed + 1);
      payoff_noisy = boot.value;
      se = boot.stderr_est;
    } else {
      const Behavior beh = exact_behavior(cfg);
      payoff_ideal = payoff_eq7(beh, ideal).value;
      payoff_noisy = payoff_eq7(beh, f).value;
    }
    const double chsh_value = ab_chsh_value(cfg);

    csv << fmt10(v) << "," << fmt10(payoff_ideal) << "," << fmt10(payoff_noisy) << ","
        << fmt10(chsh_value);
    if (se) csv << "," << fmt10(*se);
    csv << "\n";
    json row{{"v", v},
             {"payoff_ideal", payoff_ideal},
             {"payoff_noisy", payoff_noisy},
             {"chsh_value", chsh_value}};
    if (se) row["payoff_stderr"] = *se;
    rows.push_back(std::move(row));
  }

  const std::string payload = (format == "json") ? json{{"rows", rows}, {"fidelities", f}}.dump(2) + "\n"
                                                 : csv.str();
  if (out.empty())
    std::cout << payload;
  else
    write_file_atomic(out, payload);
  return kExitOk;
}

int cmd_selftest(const std::vector<double>& chsh_flag, const std::string& counts_path,
                 int resamples, std::uint64_t seed, const std::string& out) {
  std::array<double, 3> chsh{};
  json extra;
  if (!chsh_flag.empty()) {
    chsh = triple_from(chsh_flag, "--chsh");
  } else if (!counts_path.empty()) {
    const CountsRecord rec = counts_from_json(read_json_file(counts_path));
    const Behavior est = estimate_behavior(rec);
    const auto tb = triple_bell(est);
    chsh = tb.lines;
    extra["measured_lines"] = tb.lines;
    if (resamples >= 100) {
      const auto boot = bootstrap_triple_bell(rec, resamples, seed);
      extra["line_stderr"] = boot.line_se;
    }
  } else {
    throw std::invalid_argument("selftest: need --chsh or --from-counts");
  }

  const SelfTestReport rep = run_self_test(chsh);
  for (const auto& b : rep.bounds)
    if (!bound_usable(b)) throw std::runtime_error("self-testing SDP did not converge");

  json j = to_json(rep);
  if (!extra.is_null()) j["input"] = extra;
  const std::string payload = j.dump(2) + "\n";
  if (out.empty())
    std::cout << payload;
  else
    write_file_atomic(out, payload);
  return kExitOk;
}

int cmd_simulate(double v, double w, double flip, long long budget, long long chsh_budget,
                 std::uint64_t seed, const std::string& out) {
  ProtocolConfig cfg;
  cfg.visibility = v;
  cfg.phi_visibility = w;
  if (flip > 0) cfg.alice_flip = flip;
  cfg.validate();
  SamplingBudget b;
  b.steer_per_setting = budget;
  b.chsh_per_line = chsh_budget > 0 ? chsh_budget : budget;
  const CountsRecord rec = sample_counts(cfg, b, seed);
  const std::string payload = to_json(rec).dump() + "\n";
  if (out.empty())
    std::cout << payload;
  else
    write_file_atomic(out, payload);
  return kExitOk;
}

int cmd_verify(const std::string& counts_path, const std::vector<double>& fid_flag,
               const std::vector<double>& chsh_flag, int resamples, std::uint64_t seed,
               const std::string& out) {
  if (counts_path.empty()) throw std::invalid_argument("verify: need --from-counts");
  const CountsRecord rec = counts_from_json(read_json_file(counts_path));

  std::array<double, 3> f{1, 1, 1};
  if (!fid_flag.empty())
    f = triple_from(fid_flag, "--fidelities");
  else if (!chsh_flag.empty())
    f = fidelities_from_sdp(triple_from(chsh_flag, "--chsh"));
  require_fidelities(f, "verify");

  const Behavior est = estimate_behavior(rec);
  const WitnessReport point = payoff_eq7(est, f);
  const WitnessReport boot = bootstrap_witness(rec, f, resamples, seed);

  json j = to_json(boot);
  j["point_estimate"] = point.value;
  j["fidelities"] = f;
  j["threshold_visibility"] = noisy_threshold(f);
  const std::string payload = j.dump(2) + "\n";
  if (out.empty())
    std::cout << payload;
  else
    write_file_atomic(out, payload);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"device-independent steering verification toolkit"};
  app.require_subcommand(1);

  std::string config_path, out, format = "csv", counts_path;
  std::vector<double> v_grid, fidelities, chsh;
  long long budget = 0, chsh_budget = 0;
  std::uint64_t seed = 1;
  int resamples = 200;
  double sim_v = 1.0, sim_w = 1.0, sim_flip = 0.0;

  app.add_option("--config", config_path, "JSON file with default option values (flags win)");

  auto* fig3 = app.add_subcommand("reproduce-fig3", "sweep visibilities and emit payoff curves");
  fig3->add_option("--v-grid", v_grid, "visibility grid")->delimiter(',');
  fig3->add_option("--fidelities", fidelities, "self-testing fidelities f1,f2,f3")->delimiter(',');
  fig3->add_option("--chsh", chsh, "three CHSH line values; fidelities from the SDP")->delimiter(',');
  fig3->add_option("--budget", budget, "events per setting (0 = exact behavior)");
  fig3->add_option("--seed", seed, "root RNG seed");
  fig3->add_option("--resamples", resamples, "bootstrap resamples in finite mode");
  fig3->add_option("--out", out, "output path (stdout if empty)");
  fig3->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  auto* selftest = app.add_subcommand("selftest", "fidelity lower bounds from CHSH values");
  selftest->add_option("--chsh", chsh, "three CHSH line values")->delimiter(',');
  selftest->add_option("--from-counts", counts_path, "counts file; lines estimated from it");
  selftest->add_option("--resamples", resamples, "bootstrap resamples for line errors");
  selftest->add_option("--seed", seed, "root RNG seed");
  selftest->add_option("--out", out, "output path (stdout if empty)");

  auto* simulate = app.add_subcommand("simulate", "sample a finite-statistics counts record");
  simulate->add_option("--v", sim_v, "werner visibility")->required();
  simulate->add_option("--phi-visibility", sim_w, "visibility of the shared Bell pair");
  simulate->add_option("--alice-flip", sim_flip, "extra outcome-flip probability");
  simulate->add_option("--budget", budget, "events per steering setting")->required();
  simulate->add_option("--chsh-budget", chsh_budget, "events per CHSH line (default: --budget)");
  simulate->add_option("--seed", seed, "root RNG seed");
  simulate->add_option("--out", out, "output path (stdout if empty)");

  auto* verify = app.add_subcommand("verify", "evaluate the steering payoff on a counts record");
  verify->add_option("--from-counts", counts_path, "counts file")->required();
  verify->add_option("--fidelities", fidelities, "self-testing fidelities f1,f2,f3")->delimiter(',');
  verify->add_option("--chsh", chsh, "three CHSH line values; fidelities from the SDP")->delimiter(',');
  verify->add_option("--resamples", resamples, "bootstrap resamples");
  verify->add_option("--seed", seed, "root RNG seed");
  verify->add_option("--out", out, "output path (stdout if empty)");

  try {
    app.parse(argc, argv);
    apply_config(app, config_path);

    if (fig3->parsed())
      return cmd_reproduce_fig3(v_grid, fidelities, chsh, budget, seed, resamples, out, format);
    if (selftest->parsed()) return cmd_selftest(chsh, counts_path, resamples, seed, out);
    if (simulate->parsed())
      return cmd_simulate(sim_v, sim_w, sim_flip, budget, chsh_budget, seed, out);
    if (verify->parsed()) return cmd_verify(counts_path, fidelities, chsh, resamples, seed, out);
    std::cerr << "no subcommand given\n";
    return kExitInput;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
}
