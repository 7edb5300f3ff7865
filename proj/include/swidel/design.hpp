#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "swidel/jsr.hpp"
#include "swidel/model.hpp"

namespace swidel {

struct UnsupportedInstanceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Scalar deadbeat design: K(d) = K_ack / a^(dmax-d) with
/// K_ack = (-a^(dmax+1)/b, -a^dmax, ..., -a). The closed loop reaches
/// exactly zero no later than t = dmax + 1 under every switching signal.
struct DeadbeatResult {
  DepController controller;
  int settle_time;
};

DeadbeatResult design_scalar_deadbeat(double a, double b, const DelaySet& delays);

/// Candidate generator for gain searches: either a per-parameter grid or
/// seeded uniform samples in [-scale, scale].
struct GainSearchSpec {
  enum class Mode { Grid, Random };

  struct Range {
    double lo;
    double hi;
    int count;
  };

  Mode mode = Mode::Grid;
  std::vector<Range> grid;  // one range per parameter (Grid mode)
  int samples = 0;          // Random mode
  std::uint64_t seed = 0;
  double scale = 1.0;
};

struct GainSearchOutcome {
  std::vector<double> params;  // best candidate (smallest certified upper bound)
  GrowthVerdict verdict;
  bool found_stable = false;
  std::size_t evaluated = 0;
};

using SystemBuilder = std::function<SwitchingSystem(const std::vector<double>&)>;

/// Evaluates every candidate through `builder` + decide_stability and keeps
/// the one with the smallest certified upper bound (ties: first enumerated).
/// Heuristic only; makes no completeness claim when nothing certifies.
GainSearchOutcome search_gains(const SystemBuilder& builder, std::size_t n_params,
                               const GainSearchSpec& spec, double eps, std::uint64_t budget,
                               int threads = 0);

struct IndepSearchOutcome {
  IndepController best;
  GrowthVerdict verdict;
  bool found_stable = false;
  std::size_t evaluated = 0;
};

/// Delay-independent gain search over the entries of K (row-major
/// parameter order), certified through build_indep_closed_loop.
IndepSearchOutcome search_indep_gains(const Plant& plant, const DelaySet& delays,
                                      const GainSearchSpec& spec, double eps,
                                      std::uint64_t budget, int threads = 0);

}  // namespace swidel
