#pragma once

#include <random>
#include <vector>

#include "swidel/model.hpp"
#include "swidel/netsim.hpp"

namespace swidel::testsupport {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53);
}

inline Mat random_mat(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double span) {
  Mat out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = uniform(rng, -span, span);
  return out;
}

inline DelaySet random_delay_set(std::mt19937_64& rng, int max_delay) {
  std::vector<int> ds;
  while (ds.empty()) {
    ds.clear();
    for (int d = 0; d <= max_delay; ++d)
      if (rng() % 2 == 0) ds.push_back(d);
  }
  return DelaySet(ds);
}

struct RandomInstance {
  Plant plant;
  DelaySet delays;
  DepController dep;
  IndepController indep;
};

/// Random instance with n <= 3, m <= 2, d_max <= 3, with magnitudes chosen
/// so closed loops rarely blow past ~1e3 over 100 steps.
inline RandomInstance random_instance(std::mt19937_64& rng) {
  const std::size_t n = 1 + rng() % 3;
  const std::size_t m = 1 + rng() % 2;
  DelaySet delays = random_delay_set(rng, 3);
  Plant plant(random_mat(rng, n, n, 0.5), random_mat(rng, n, m, 1.0));
  const std::size_t cols = n + static_cast<std::size_t>(delays.d_max()) * m;
  DepController dep;
  for (int d : delays.delays()) dep.gains.emplace(d, random_mat(rng, m, cols, 0.25));
  IndepController indep{random_mat(rng, m, cols, 0.25)};
  return RandomInstance{std::move(plant), std::move(delays), std::move(dep), std::move(indep)};
}

/// Extended state of the matrix reduction matching a NetState:
/// (x, u-queue) for the delay-dependent loop, plus the v-memory for the
/// delay-independent one.
inline Vec reduction_state(const NetState& s, bool with_memory) {
  Vec out = s.x;
  for (const Vec& u : s.queue) out.insert(out.end(), u.begin(), u.end());
  if (with_memory)
    for (const Vec& v : s.memory) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace swidel::testsupport
