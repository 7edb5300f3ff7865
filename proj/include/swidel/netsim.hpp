#pragma once

#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "swidel/model.hpp"

namespace swidel {

enum class SignalKind { Constant, Periodic, SeededRandom, Greedy, Explicit };

/// A per-step delay choice. Non-greedy kinds are materialized up front;
/// greedy picks the worst successor while a simulation runs.
struct SwitchingSignal {
  SignalKind kind = SignalKind::Explicit;
  std::vector<int> values;  // empty for greedy
  std::uint64_t seed = 0;

  static SwitchingSignal constant(int d, int length, const DelaySet& delays);
  static SwitchingSignal periodic(const std::vector<int>& pattern, int length,
                                  const DelaySet& delays);
  static SwitchingSignal seeded_random(std::uint64_t seed, int length, const DelaySet& delays);
  static SwitchingSignal greedy();
  static SwitchingSignal explicit_seq(std::vector<int> values, const DelaySet& delays);
};

/// Materializes a signal of the given kind and length over D.
SwitchingSignal gen_signal(SignalKind kind, const DelaySet& delays, std::uint64_t seed,
                           int length, const std::vector<int>& params = {});

/// Plant state plus the in-flight command queue and the controller's
/// output memory. queue[s-1] holds u_s (commands s steps from arrival);
/// memory is ordered oldest to newest, ending at v(t-1).
struct NetState {
  Vec x;
  std::vector<Vec> queue;
  std::vector<Vec> memory;
  long t = 0;
};

using Controller = std::variant<std::monostate, DepController, IndepController>;

NetState initial_state(const Plant& plant, const DelaySet& delays, const Vec& x0);
Vec extended_state(const NetState& s);
double extended_norm(const NetState& s);

/// Controller output v(t) from the state the controller can see.
Vec controller_output(const Plant& plant, const DelaySet& delays, const Controller& ctrl,
                      const NetState& s, int d);

/// One transition under delay d: x+ = A x + B u_1 + [d=0] B v, queue shift
/// with injection at slot d, memory shift appending v.
NetState step(const Plant& plant, const DelaySet& delays, const Controller& ctrl,
              const NetState& s, int d);

struct Trajectory {
  std::vector<NetState> states;
  std::vector<int> signal;    // realized delay sequence
  std::vector<double> norms;  // extended-state norm per step
  bool diverged = false;
};

Trajectory simulate(const Plant& plant, const DelaySet& delays, const Controller& ctrl,
                    const SwitchingSignal& signal, const Vec& x0, int horizon);

/// Same as simulate but from an explicit extended initial state.
Trajectory simulate_from(const Plant& plant, const DelaySet& delays, const Controller& ctrl,
                         const SwitchingSignal& signal, NetState init, int horizon);

/// Matrix iteration of a switching system; the reduction side of the
/// fidelity checks and the driver for explicit matrix-set instances.
struct SystemTrajectory {
  std::vector<Vec> states;
  std::vector<int> signal;
  std::vector<double> norms;
  bool diverged = false;
};

SystemTrajectory iterate_system(const SwitchingSystem& sys, const SwitchingSignal& signal,
                                const Vec& w0, int horizon);

/// Norm above which a trajectory is flagged as diverged.
inline constexpr double kDivergenceNorm = 1e12;

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const Plant& plant,
                          const DelaySet& delays);
void write_system_trajectory_csv(std::ostream& out, const SystemTrajectory& traj,
                                 const SwitchingSystem& sys);

}  // namespace swidel
