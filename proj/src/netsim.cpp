#include "swidel/netsim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>

namespace swidel {

namespace {

void check_member(int d, const DelaySet& delays) {
  if (!delays.contains(d))
    throw InvalidDelayError("signal value " + std::to_string(d) + " not in delay set");
}

void check_length(int length) {
  if (length < 0) throw std::invalid_argument("signal length must be nonnegative");
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SwitchingSignal SwitchingSignal::constant(int d, int length, const DelaySet& delays) {
  check_length(length);
  check_member(d, delays);
  SwitchingSignal s;
  s.kind = SignalKind::Constant;
  s.values.assign(static_cast<std::size_t>(length), d);
  return s;
}

SwitchingSignal SwitchingSignal::periodic(const std::vector<int>& pattern, int length,
                                          const DelaySet& delays) {
  check_length(length);
  if (pattern.empty()) throw std::invalid_argument("periodic signal: empty pattern");
  for (int d : pattern) check_member(d, delays);
  SwitchingSignal s;
  s.kind = SignalKind::Periodic;
  for (int t = 0; t < length; ++t) s.values.push_back(pattern[t % pattern.size()]);
  return s;
}

SwitchingSignal SwitchingSignal::seeded_random(std::uint64_t seed, int length,
                                               const DelaySet& delays) {
  check_length(length);
  SwitchingSignal s;
  s.kind = SignalKind::SeededRandom;
  s.seed = seed;
  std::mt19937_64 rng(seed);
  const auto& ds = delays.delays();
  for (int t = 0; t < length; ++t)
    s.values.push_back(ds[static_cast<std::size_t>(rng() % ds.size())]);
  return s;
}

SwitchingSignal SwitchingSignal::greedy() {
  SwitchingSignal s;
  s.kind = SignalKind::Greedy;
  return s;
}

SwitchingSignal SwitchingSignal::explicit_seq(std::vector<int> values, const DelaySet& delays) {
  for (int d : values) check_member(d, delays);
  SwitchingSignal s;
  s.kind = SignalKind::Explicit;
  s.values = std::move(values);
  return s;
}

SwitchingSignal gen_signal(SignalKind kind, const DelaySet& delays, std::uint64_t seed,
                           int length, const std::vector<int>& params) {
  switch (kind) {
    case SignalKind::Constant:
      if (params.size() != 1)
        throw std::invalid_argument("constant signal: expected one delay parameter");
      return SwitchingSignal::constant(params[0], length, delays);
    case SignalKind::Periodic:
      return SwitchingSignal::periodic(params, length, delays);
    case SignalKind::SeededRandom:
      return SwitchingSignal::seeded_random(seed, length, delays);
    case SignalKind::Greedy:
      return SwitchingSignal::greedy();
    case SignalKind::Explicit:
      return SwitchingSignal::explicit_seq(params, delays);
  }
  throw std::invalid_argument("unknown signal kind");
}

NetState initial_state(const Plant& plant, const DelaySet& delays, const Vec& x0) {
  if (x0.size() != plant.n())
    throw ShapeError("initial state: x0 must have the plant dimension");
  NetState s;
  s.x = x0;
  s.queue.assign(static_cast<std::size_t>(delays.d_max()), Vec(plant.m(), 0.0));
  s.memory.assign(static_cast<std::size_t>(delays.d_max()), Vec(plant.m(), 0.0));
  s.t = 0;
  return s;
}

Vec extended_state(const NetState& s) {
  Vec out = s.x;
  for (const Vec& u : s.queue) out.insert(out.end(), u.begin(), u.end());
  for (const Vec& v : s.memory) out.insert(out.end(), v.begin(), v.end());
  return out;
}

double extended_norm(const NetState& s) { return norm2(extended_state(s)); }

Vec controller_output(const Plant& plant, const DelaySet& delays, const Controller& ctrl,
                      const NetState& s, int d) {
  if (std::holds_alternative<std::monostate>(ctrl)) return Vec(plant.m(), 0.0);
  if (const auto* dep = std::get_if<DepController>(&ctrl)) {
    auto it = dep->gains.find(d);
    if (it == dep->gains.end())
      throw InvalidDelayError("controller has no gain for delay " + std::to_string(d));
    Vec visible = s.x;
    for (const Vec& u : s.queue) visible.insert(visible.end(), u.begin(), u.end());
    return it->second * visible;
  }
  const auto& indep = std::get<IndepController>(ctrl);
  Vec visible = s.x;
  for (const Vec& v : s.memory) visible.insert(visible.end(), v.begin(), v.end());
  (void)delays;
  return indep.K * visible;
}

NetState step(const Plant& plant, const DelaySet& delays, const Controller& ctrl,
              const NetState& s, int d) {
  if (!delays.contains(d))
    throw InvalidDelayError("step: delay " + std::to_string(d) + " not in delay set");
  const std::size_t d_max = static_cast<std::size_t>(delays.d_max());
  const Vec v = controller_output(plant, delays, ctrl, s, d);

  NetState next;
  next.t = s.t + 1;
  next.x = plant.A * s.x;
  if (d_max >= 1) {
    const Vec bu = plant.B * s.queue[0];
    for (std::size_t i = 0; i < next.x.size(); ++i) next.x[i] += bu[i];
  }
  if (d == 0) {
    const Vec bv = plant.B * v;
    for (std::size_t i = 0; i < next.x.size(); ++i) next.x[i] += bv[i];
  }
  next.queue.assign(d_max, Vec(plant.m(), 0.0));
  for (std::size_t slot = 0; slot + 1 < d_max; ++slot) next.queue[slot] = s.queue[slot + 1];
  if (d >= 1)
    for (std::size_t i = 0; i < v.size(); ++i) next.queue[static_cast<std::size_t>(d) - 1][i] += v[i];
  next.memory.assign(d_max, Vec(plant.m(), 0.0));
  for (std::size_t i = 0; i + 1 < d_max; ++i) next.memory[i] = s.memory[i + 1];
  if (d_max >= 1) next.memory[d_max - 1] = v;
  return next;
}

namespace {

int resolve_delay(const Plant& plant, const DelaySet& delays, const Controller& ctrl,
                  const SwitchingSignal& signal, const NetState& s, int t) {
  if (signal.kind == SignalKind::Greedy) {
    int best_d = delays.delays().front();
    double best_norm = -1.0;
    for (int d : delays.delays()) {
      const double nm = extended_norm(step(plant, delays, ctrl, s, d));
      if (nm > best_norm) {
        best_norm = nm;
        best_d = d;
      }
    }
    return best_d;
  }
  if (static_cast<std::size_t>(t) >= signal.values.size())
    throw std::invalid_argument("signal shorter than simulation horizon");
  return signal.values[static_cast<std::size_t>(t)];
}

}  // namespace

Trajectory simulate_from(const Plant& plant, const DelaySet& delays, const Controller& ctrl,
                         const SwitchingSignal& signal, NetState init, int horizon) {
  if (horizon < 0) throw std::invalid_argument("simulate: horizon must be nonnegative");
  Trajectory traj;
  traj.states.push_back(std::move(init));
  traj.norms.push_back(extended_norm(traj.states.back()));
  for (int t = 0; t < horizon; ++t) {
    const NetState& cur = traj.states.back();
    const int d = resolve_delay(plant, delays, ctrl, signal, cur, t);
    traj.signal.push_back(d);
    traj.states.push_back(step(plant, delays, ctrl, cur, d));
    traj.norms.push_back(extended_norm(traj.states.back()));
    if (traj.norms.back() > kDivergenceNorm) traj.diverged = true;
  }
  return traj;
}

Trajectory simulate(const Plant& plant, const DelaySet& delays, const Controller& ctrl,
                    const SwitchingSignal& signal, const Vec& x0, int horizon) {
  return simulate_from(plant, delays, ctrl, signal, initial_state(plant, delays, x0), horizon);
}

SystemTrajectory iterate_system(const SwitchingSystem& sys, const SwitchingSignal& signal,
                                const Vec& w0, int horizon) {
  if (horizon < 0) throw std::invalid_argument("iterate_system: horizon must be nonnegative");
  if (w0.size() != sys.dim)
    throw ShapeError("iterate_system: state must match system dimension");
  SystemTrajectory traj;
  traj.states.push_back(w0);
  traj.norms.push_back(norm2(w0));
  for (int t = 0; t < horizon; ++t) {
    const Vec& cur = traj.states.back();
    int d;
    if (signal.kind == SignalKind::Greedy) {
      d = sys.delays.front();
      double best = -1.0;
      for (std::size_t i = 0; i < sys.size(); ++i) {
        const double nm = norm2(sys.matrices[i] * cur);
        if (nm > best) {
          best = nm;
          d = sys.delays[i];
        }
      }
    } else {
      if (static_cast<std::size_t>(t) >= signal.values.size())
        throw std::invalid_argument("signal shorter than simulation horizon");
      d = signal.values[static_cast<std::size_t>(t)];
    }
    traj.signal.push_back(d);
    traj.states.push_back(sys.matrix_for(d) * cur);
    traj.norms.push_back(norm2(traj.states.back()));
    if (traj.norms.back() > kDivergenceNorm) traj.diverged = true;
  }
  return traj;
}

namespace {

void write_csv_rows(std::ostream& out, const std::vector<std::string>& labels,
                    const std::vector<Vec>& rows, const std::vector<int>& signal,
                    const std::vector<double>& norms) {
  out << "t,sigma";
  for (const auto& name : labels) out << ',' << name;
  out << ",norm\n";
  for (std::size_t t = 0; t < rows.size(); ++t) {
    out << t << ',';
    if (t < signal.size()) out << signal[t];
    for (double x : rows[t]) out << ',' << fmt17(x);
    out << ',' << fmt17(norms[t]) << '\n';
  }
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const Plant& plant,
                          const DelaySet& delays) {
  std::vector<Vec> rows;
  rows.reserve(traj.states.size());
  for (const NetState& s : traj.states) rows.push_back(extended_state(s));
  write_csv_rows(out, indep_layout(plant.n(), plant.m(), delays.d_max()), rows, traj.signal,
                 traj.norms);
}

void write_system_trajectory_csv(std::ostream& out, const SystemTrajectory& traj,
                                 const SwitchingSystem& sys) {
  write_csv_rows(out, sys.layout, traj.states, traj.signal, traj.norms);
}

}  // namespace swidel
