#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "swidel/model.hpp"

namespace swidel {

/// Certified bounds on the joint spectral radius of a switching system.
/// `witness` is the delay word whose product attains `lower` as
/// spectral_radius(product)^(1/length).
struct JsrBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<int> witness;
  std::uint64_t explored = 0;
  bool converged = false;
};

enum class Stability { Stable, Unstable, Undetermined };

/// Outcome of a growth-rate or stability decision. `upper_certified` /
/// `lower_certified` record which side(s) of the target rate were settled;
/// `bounds` are always valid regardless of convergence.
struct GrowthVerdict {
  enum class Kind { UpperCertified, LowerCertified, Bracket };

  Kind kind = Kind::Bracket;
  bool upper_certified = false;
  bool lower_certified = false;
  double rate = 0.0;  // certified rate for the primary kind
  JsrBounds bounds;
  Stability stability = Stability::Undetermined;
  double undetermined_eps = 0.0;  // bracket width when Undetermined
};

struct JsrOptions {
  double eps = 1e-3;
  std::uint64_t budget = 2'000'000;
  int threads = 0;             // 0 = machine default, capped by SWIDEL_THREADS
  bool deterministic = false;  // force single-threaded exploration
  std::vector<std::pair<double, double>>* trace = nullptr;  // (lower, upper) per round
};

/// Branch-and-bound JSR bounds: lower from spectral radii of explored
/// products, upper from the prefix-norm frontier; a branch is pruned once
/// its best prefix norm-root cannot exceed lower + eps.
JsrBounds jsr_bounds(const SwitchingSystem& sys, const JsrOptions& opts);
JsrBounds jsr_bounds(const SwitchingSystem& sys, double eps, std::uint64_t budget = 2'000'000);

/// Decides whether the worst growth rate lies below r + eps or above
/// r - eps (both may hold); budget exhaustion yields a plain bracket.
GrowthVerdict decide_growth(const SwitchingSystem& sys, double r, const JsrOptions& opts);
GrowthVerdict decide_growth(const SwitchingSystem& sys, double r, double eps,
                            std::uint64_t budget = 2'000'000);

/// Stability under arbitrary switching: Stable iff the upper bound drops
/// below 1, Unstable iff the lower bound exceeds 1, Undetermined when the
/// bracket still contains 1 at width <= eps (or the budget ran out).
GrowthVerdict decide_stability(const SwitchingSystem& sys, const JsrOptions& opts);
GrowthVerdict decide_stability(const SwitchingSystem& sys, double eps,
                               std::uint64_t budget = 2'000'000);

}  // namespace swidel
