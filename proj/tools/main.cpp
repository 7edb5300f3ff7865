#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "swidel/design.hpp"
#include "swidel/instance.hpp"
#include "swidel/jsr.hpp"
#include "swidel/netsim.hpp"

namespace {

using nlohmann::json;
using namespace swidel;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  out << text;
}

int cmd_build(const std::string& instance_path, const std::string& out_path) {
  const Instance inst = load_instance(instance_path);
  emit(system_report(system_of(inst)).dump(2), out_path);
  return 0;
}

// Seeds a NetState from a plant-sized or fully extended initial vector.
NetState seed_state(const Plant& plant, const DelaySet& delays, const Vec& x0) {
  const std::size_t n = plant.n();
  const std::size_t m = plant.m();
  const std::size_t d_max = static_cast<std::size_t>(delays.d_max());
  if (x0.size() == n) return initial_state(plant, delays, x0);
  if (x0.size() == n + 2 * d_max * m) {
    NetState s = initial_state(plant, delays, Vec(x0.begin(), x0.begin() + n));
    std::size_t at = n;
    for (std::size_t slot = 0; slot < d_max; ++slot)
      for (std::size_t i = 0; i < m; ++i) s.queue[slot][i] = x0[at++];
    for (std::size_t slot = 0; slot < d_max; ++slot)
      for (std::size_t i = 0; i < m; ++i) s.memory[slot][i] = x0[at++];
    return s;
  }
  throw std::invalid_argument("x0 must have plant dimension " + std::to_string(n) +
                              " or extended dimension " + std::to_string(n + 2 * d_max * m));
}

int cmd_simulate(const std::string& instance_path, std::string signal_spec, int horizon,
                 const std::string& out_path) {
  const Instance inst = load_instance(instance_path);
  if (horizon < 1) throw std::invalid_argument("--horizon must be >= 1");
  if (signal_spec.empty()) signal_spec = inst.signal_spec;
  if (signal_spec.empty())
    throw std::invalid_argument("no signal: pass --signal or set \"signal\" in the instance");

  std::ostringstream csv;
  double final_norm = 0.0;
  bool diverged = false;
  if (inst.has_network_semantics()) {
    const Plant& plant = *inst.plant;
    const DelaySet& delays = *inst.delays;
    const SwitchingSignal signal = parse_signal_spec(signal_spec, delays, horizon);
    Vec x0 = inst.x0;
    if (x0.empty()) {
      x0.assign(plant.n(), 0.0);
      x0[0] = 1.0;
    }
    const Trajectory traj = simulate_from(plant, delays, controller_of(inst), signal,
                                          seed_state(plant, delays, x0), horizon);
    write_trajectory_csv(csv, traj, plant, delays);
    final_norm = traj.norms.back();
    diverged = traj.diverged;
  } else {
    const SwitchingSystem sys = system_of(inst);
    const DelaySet delays(sys.delays);
    const SwitchingSignal signal = parse_signal_spec(signal_spec, delays, horizon);
    Vec w0 = inst.x0;
    if (w0.empty()) {
      w0.assign(sys.dim, 0.0);
      w0[0] = 1.0;
    } else if (inst.kind == ControllerKind::Example2 && w0.size() == 1) {
      // scalar x(0), with empty memory and queue
      w0 = {0.0, inst.x0[0], 0.0};
    }
    const SystemTrajectory traj = iterate_system(sys, signal, w0, horizon);
    write_system_trajectory_csv(csv, traj, sys);
    final_norm = traj.norms.back();
    diverged = traj.diverged;
  }
  emit(csv.str(), out_path);
  char summary[128];
  std::snprintf(summary, sizeof summary, "final_norm=%.17g diverged=%d", final_norm,
                diverged ? 1 : 0);
  std::cerr << summary << '\n';
  return 0;
}

JsrOptions make_options(double eps, std::uint64_t budget, bool deterministic) {
  JsrOptions opts;
  opts.eps = eps;
  opts.budget = budget;
  opts.deterministic = deterministic;
  return opts;
}

int cmd_jsr(const std::string& instance_path, double eps, std::uint64_t budget,
            bool deterministic, const std::string& out_path) {
  const Instance inst = load_instance(instance_path);
  const SwitchingSystem sys = system_of(inst);
  const GrowthVerdict v = decide_stability(sys, make_options(eps, budget, deterministic));
  emit(verdict_report(v).dump(2), out_path);
  return verdict_exit_code(v, /*use_stability=*/true);
}

int cmd_decide(const std::string& instance_path, double rate, double eps, std::uint64_t budget,
               bool deterministic, const std::string& out_path) {
  const Instance inst = load_instance(instance_path);
  const SwitchingSystem sys = system_of(inst);
  const GrowthVerdict v = decide_growth(sys, rate, make_options(eps, budget, deterministic));
  json report = verdict_report(v);
  report["rate_target"] = rate;
  emit(report.dump(2), out_path);
  return verdict_exit_code(v, /*use_stability=*/false);
}

GainSearchSpec::Range parse_range(const std::string& text) {
  // lo:hi:count
  const std::size_t c1 = text.find(':');
  const std::size_t c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("grid range must be lo:hi:count, got '" + text + "'");
  GainSearchSpec::Range r;
  r.lo = std::stod(text.substr(0, c1));
  r.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  r.count = std::stoi(text.substr(c2 + 1));
  return r;
}

int cmd_design(const std::string& instance_path, const std::string& method,
               const std::vector<std::string>& grid_ranges, int samples, std::uint64_t seed,
               double scale, double eps, std::uint64_t budget, const std::string& out_path) {
  const Instance inst = load_instance(instance_path);
  json report;
  GrowthVerdict verdict;
  bool have_verdict = false;

  if (method == "deadbeat") {
    if (!inst.plant || inst.plant->n() != 1 || inst.plant->m() != 1)
      throw std::invalid_argument("deadbeat design needs a scalar plant instance");
    const double a = inst.plant->A(0, 0);
    const double b = inst.plant->B(0, 0);
    const DeadbeatResult res = design_scalar_deadbeat(a, b, *inst.delays);
    json gains = json::object();
    for (const auto& [d, K] : res.controller.gains) gains[std::to_string(d)] = mat_to_json(K);
    report = {{"method", "deadbeat"},
              {"settle_time", res.settle_time},
              {"controller", {{"type", "delay_dependent"}, {"gains", std::move(gains)}}}};
  } else if (method == "search") {
    GainSearchSpec spec;
    if (!grid_ranges.empty()) {
      spec.mode = GainSearchSpec::Mode::Grid;
      for (const auto& g : grid_ranges) spec.grid.push_back(parse_range(g));
    } else {
      spec.mode = GainSearchSpec::Mode::Random;
      spec.samples = samples;
      spec.seed = seed;
      spec.scale = scale;
    }
    if (inst.kind == ControllerKind::Example2) {
      const double a = inst.a, b = inst.b;
      auto builder = [a, b](const std::vector<double>& p) {
        return build_example2(a, b, p[0], p[1]);
      };
      const GainSearchOutcome got = search_gains(builder, 2, spec, eps, budget);
      verdict = got.verdict;
      have_verdict = true;
      report = {{"method", "search"},
                {"k1", got.params[0]},
                {"k2", got.params[1]},
                {"found_stable", got.found_stable},
                {"evaluated", got.evaluated},
                {"certificate", verdict_report(got.verdict)}};
    } else if (inst.plant && inst.delays) {
      const IndepSearchOutcome got =
          search_indep_gains(*inst.plant, *inst.delays, spec, eps, budget);
      verdict = got.verdict;
      have_verdict = true;
      report = {{"method", "search"},
                {"controller", {{"type", "delay_independent"}, {"K", mat_to_json(got.best.K)}}},
                {"found_stable", got.found_stable},
                {"evaluated", got.evaluated},
                {"certificate", verdict_report(got.verdict)}};
    } else {
      throw std::invalid_argument("search needs a plant instance or an example2 instance");
    }
  } else {
    throw std::invalid_argument("unknown design method '" + method + "'");
  }

  emit(report.dump(2), out_path);
  return have_verdict ? verdict_exit_code(verdict, /*use_stability=*/true) : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swidel: switched-delay control loops as switching systems"};
  app.require_subcommand(1);

  std::string instance_path, out_path, signal_spec, method = "deadbeat";
  std::vector<std::string> grid_ranges;
  int horizon = 10, samples = 64;
  double eps = 1e-3, rate = 1.0, scale = 1.0;
  std::uint64_t budget = 2'000'000, seed = 0;
  bool deterministic = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("instance", instance_path, "instance JSON file")->required();
    sub->add_option("--out", out_path, "write the report to a file instead of stdout");
  };

  CLI::App* build = app.add_subcommand("build", "emit the switching-system matrices");
  add_common(build);

  CLI::App* simulate = app.add_subcommand("simulate", "simulate and export a CSV trajectory");
  add_common(simulate);
  simulate->add_option("--signal", signal_spec,
                       "const:d | periodic:d1,d2,... | random:seed=S | greedy | explicit:...");
  simulate->add_option("--horizon", horizon, "number of steps")->required();

  CLI::App* jsr = app.add_subcommand("jsr", "certified joint-spectral-radius bounds");
  add_common(jsr);
  jsr->add_option("--eps", eps, "target bracket width");
  jsr->add_option("--budget", budget, "maximum products to examine");
  jsr->add_flag("--deterministic", deterministic, "single-threaded exploration");

  CLI::App* decide =
      app.add_subcommand("decide", "compare the worst growth rate against a target");
  add_common(decide);
  decide->add_option("--rate", rate, "growth-rate target r")->required();
  decide->add_option("--eps", eps, "decision tolerance");
  decide->add_option("--budget", budget, "maximum products to examine");
  decide->add_flag("--deterministic", deterministic, "single-threaded exploration");

  CLI::App* design = app.add_subcommand("design", "controller synthesis");
  add_common(design);
  design->add_option("--method", method, "deadbeat | search");
  design->add_option("--grid", grid_ranges, "per-parameter grid ranges lo:hi:count");
  design->add_option("--samples", samples, "random candidate count");
  design->add_option("--seed", seed, "random candidate seed");
  design->add_option("--scale", scale, "random candidate magnitude");
  design->add_option("--eps", eps, "certification tolerance");
  design->add_option("--budget", budget, "jsr budget per candidate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) return cmd_build(instance_path, out_path);
    if (simulate->parsed()) return cmd_simulate(instance_path, signal_spec, horizon, out_path);
    if (jsr->parsed()) return cmd_jsr(instance_path, eps, budget, deterministic, out_path);
    if (decide->parsed())
      return cmd_decide(instance_path, rate, eps, budget, deterministic, out_path);
    if (design->parsed())
      return cmd_design(instance_path, method, grid_ranges, samples, seed, scale, eps, budget,
                        out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
