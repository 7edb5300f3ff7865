#include "swidel/design.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "parallel.hpp"

namespace swidel {

DeadbeatResult design_scalar_deadbeat(double a, double b, const DelaySet& delays) {
  if (a == 0.0 || b == 0.0)
    throw UnsupportedInstanceError("scalar deadbeat design requires a != 0 and b != 0");
  const int d_max = delays.d_max();

  Vec ack(static_cast<std::size_t>(d_max) + 1);
  ack[0] = -std::pow(a, d_max + 1) / b;
  for (int s = 1; s <= d_max; ++s) ack[static_cast<std::size_t>(s)] = -std::pow(a, d_max - s + 1);

  DeadbeatResult out{DepController{}, d_max + 1};
  for (int d : delays.delays()) {
    const double denom = std::pow(a, d_max - d);
    Vec row(ack.size());
    for (std::size_t i = 0; i < ack.size(); ++i) row[i] = ack[i] / denom;
    out.controller.gains.emplace(d, Mat(1, ack.size(), std::move(row)));
  }
  return out;
}

namespace {

std::vector<std::vector<double>> enumerate_candidates(std::size_t n_params,
                                                      const GainSearchSpec& spec) {
  std::vector<std::vector<double>> out;
  if (spec.mode == GainSearchSpec::Mode::Grid) {
    if (spec.grid.size() != n_params)
      throw std::invalid_argument("gain search: grid must cover every parameter");
    std::size_t total = 1;
    for (const auto& r : spec.grid) {
      if (r.count < 1) throw std::invalid_argument("gain search: grid count must be >= 1");
      total *= static_cast<std::size_t>(r.count);
    }
    std::vector<double> cand(n_params);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      for (std::size_t p = n_params; p-- > 0;) {
        const auto& r = spec.grid[p];
        const std::size_t k = rem % static_cast<std::size_t>(r.count);
        rem /= static_cast<std::size_t>(r.count);
        cand[p] = r.count == 1 ? r.lo : r.lo + (r.hi - r.lo) * double(k) / double(r.count - 1);
      }
      out.push_back(cand);
    }
  } else {
    if (spec.samples < 1)
      throw std::invalid_argument("gain search: need at least one random sample");
    std::mt19937_64 rng(spec.seed);
    auto unit = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
    for (int s = 0; s < spec.samples; ++s) {
      std::vector<double> cand(n_params);
      for (auto& x : cand) x = (2.0 * unit() - 1.0) * spec.scale;
      out.push_back(std::move(cand));
    }
  }
  if (out.empty()) throw std::invalid_argument("gain search: empty candidate set");
  return out;
}

}  // namespace

GainSearchOutcome search_gains(const SystemBuilder& builder, std::size_t n_params,
                               const GainSearchSpec& spec, double eps, std::uint64_t budget,
                               int threads) {
  const auto candidates = enumerate_candidates(n_params, spec);
  std::vector<GrowthVerdict> verdicts(candidates.size());
  const int workers = detail::resolve_threads(threads, false);
  detail::parallel_for(candidates.size(), workers, [&](std::size_t i) {
    JsrOptions opts;
    opts.eps = eps;
    opts.budget = budget;
    opts.threads = 1;  // parallelism is across candidates here
    verdicts[i] = decide_stability(builder(candidates[i]), opts);
  });

  GainSearchOutcome out;
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (verdicts[i].bounds.upper < verdicts[best].bounds.upper) best = i;
  out.params = candidates[best];
  out.verdict = verdicts[best];
  out.evaluated = candidates.size();
  for (const auto& v : verdicts)
    if (v.stability == Stability::Stable) out.found_stable = true;
  return out;
}

IndepSearchOutcome search_indep_gains(const Plant& plant, const DelaySet& delays,
                                      const GainSearchSpec& spec, double eps,
                                      std::uint64_t budget, int threads) {
  const std::size_t m = plant.m();
  const std::size_t cols = plant.n() + static_cast<std::size_t>(delays.d_max()) * m;
  const std::size_t n_params = m * cols;
  auto builder = [&](const std::vector<double>& params) {
    return build_indep_closed_loop(plant, delays, IndepController{Mat(m, cols, params)});
  };
  GainSearchOutcome got = search_gains(builder, n_params, spec, eps, budget, threads);
  IndepSearchOutcome out;
  out.best = IndepController{Mat(m, cols, got.params)};
  out.verdict = std::move(got.verdict);
  out.found_stable = got.found_stable;
  out.evaluated = got.evaluated;
  return out;
}

}  // namespace swidel
