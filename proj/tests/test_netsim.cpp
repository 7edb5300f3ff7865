#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "swidel/design.hpp"
#include "swidel/netsim.hpp"
#include "test_support.hpp"

using namespace swidel;
using namespace swidel::testsupport;

namespace {

Plant example1_plant() {
  return Plant(Mat::from_rows({{0, 2}, {2, 0}}), Mat::from_rows({{0}, {1}}));
}

}  // namespace

TEST_CASE("zero controller with an empty queue is autonomous") {
  Plant plant(Mat::from_rows({{0.5, 0.25}, {0.0, -0.5}}), Mat::from_rows({{1.0}, {2.0}}));
  DelaySet delays({0, 2});
  NetState s = initial_state(plant, delays, {1.0, -1.0});
  NetState next = step(plant, delays, std::monostate{}, s, 2);
  CHECK(next.x[0] == doctest::Approx(0.25));
  CHECK(next.x[1] == doctest::Approx(0.5));
  for (const Vec& u : next.queue)
    for (double v : u) CHECK(v == 0.0);
}

TEST_CASE("periodic switching on the two-dimensional shuttle plant") {
  // A = [[0,2],[2,0]], x(0) = (1,0), no controller: x_1 doubles every step
  // in the swapped coordinate, so x_1(t) = 2^t exactly at even t.
  Plant plant = example1_plant();
  DelaySet delays({0, 1});
  SwitchingSignal sig = SwitchingSignal::periodic({0, 1}, 10, delays);
  Trajectory traj = simulate(plant, delays, std::monostate{}, sig, {1.0, 0.0}, 10);
  for (int t = 0; t <= 10; t += 2) {
    CHECK(traj.states[t].x[0] == std::pow(2.0, t));  // exact in floating point
    CHECK(traj.states[t].x[1] == 0.0);
  }
  for (int t = 1; t <= 9; t += 2) CHECK(traj.states[t].x[0] == 0.0);
}

TEST_CASE("a delay-0 gain can break the shuttle growth pattern") {
  // Under the operative semantics a delay-0 command lands in x_2(t+1) and
  // reaches x_1 at t+2 through A. The gain K(0) = (-2, 0, 0) cancels the
  // even-step growth entirely; the growth claim is signal- and
  // controller-dependent here.
  Plant plant = example1_plant();
  DelaySet delays({0, 1});
  DepController ctrl;
  ctrl.gains.emplace(0, Mat::from_rows({{-2.0, 0.0, 0.0}}));
  ctrl.gains.emplace(1, Mat(1, 3));
  SwitchingSignal sig = SwitchingSignal::periodic({0, 1}, 10, delays);
  Trajectory traj = simulate(plant, delays, ctrl, sig, {1.0, 0.0}, 10);
  for (int t = 2; t <= 10; ++t) CHECK(std::fabs(traj.states[t].x[0]) < 1e-12);
}

TEST_CASE("scalar deadbeat settles in d_max + 1 steps on every signal") {
  DelaySet delays({0, 1});
  DeadbeatResult db = design_scalar_deadbeat(2.0, 1.0, delays);
  Plant plant(Mat::from_rows({{2.0}}), Mat::from_rows({{1.0}}));
  for (int word = 0; word < (1 << 5); ++word) {
    std::vector<int> vals(5);
    for (int p = 0; p < 5; ++p) vals[p] = (word >> p) & 1;
    SwitchingSignal sig = SwitchingSignal::explicit_seq(vals, delays);
    Trajectory traj = simulate(plant, delays, db.controller, sig, {1.0}, 5);
    for (int t = 2; t <= 5; ++t) {
      CHECK(std::fabs(traj.states[t].x[0]) < 1e-10);
      CHECK(std::fabs(traj.states[t].queue[0][0]) < 1e-10);
    }
  }
}

TEST_CASE("horizon zero returns only the initial state") {
  Plant plant(Mat::from_rows({{1.0}}), Mat::from_rows({{1.0}}));
  DelaySet delays({0});
  SwitchingSignal sig = SwitchingSignal::constant(0, 0, delays);
  Trajectory traj = simulate(plant, delays, std::monostate{}, sig, {3.0}, 0);
  CHECK(traj.states.size() == 1);
  CHECK(traj.signal.empty());
  CHECK(traj.norms.size() == 1);
}

TEST_CASE("gadget loop contracts at the controller rate on constant delay 0") {
  // A = 0, B = I, K = (A1 | A2) with A1 = A2 = 0.5 I: under constant
  // delay 0 the queue stays empty and x(t+1) = 0.5 x(t) exactly.
  Mat half = 0.5 * Mat::identity(2);
  HardnessGadget g = build_hardness_gadget(half, half);
  SwitchingSignal sig = SwitchingSignal::constant(0, 8, g.delays);
  Trajectory traj = simulate(g.plant, g.delays, g.controller, sig, {1.0, -2.0}, 8);
  for (int t = 0; t < 8; ++t) {
    CHECK(traj.states[t].x[0] == std::pow(0.5, t));
    CHECK(traj.states[t].x[1] == -2.0 * std::pow(0.5, t));
    CHECK(traj.states[t].queue[0][0] == 0.0);
  }
  // after the first output lands in the memory, the whole state halves
  for (int t = 1; t < 8; ++t)
    CHECK(traj.norms[t + 1] == doctest::Approx(0.5 * traj.norms[t]).epsilon(1e-12));
}

TEST_CASE("gadget embedding contracts at the controller rate on any signal") {
  Mat half = 0.5 * Mat::identity(2);
  SwitchingSystem sys = build_gadget_system(half, half);
  DelaySet delays({0, 1});
  for (std::uint64_t seed : {1ULL, 2ULL}) {
    SwitchingSignal sig = SwitchingSignal::seeded_random(seed, 8, delays);
    SystemTrajectory traj = iterate_system(sys, sig, {1.0, 0.0, -1.0, 0.5}, 8);
    for (int t = 1; t < 8; ++t)
      CHECK(traj.norms[t + 1] == doctest::Approx(0.5 * traj.norms[t]).epsilon(1e-12));
  }
}

TEST_CASE("greedy switching finds growth on the unstable example2 system") {
  SwitchingSystem sys = build_example2(2.0, 1.0, 0.0, -0.5);
  SystemTrajectory traj = iterate_system(sys, SwitchingSignal::greedy(), {1.0, 1.0, 1.0}, 40);
  const double ratio = std::pow(traj.norms.back() / traj.norms.front(), 1.0 / 40.0);
  CHECK(ratio >= 1.0);
}

TEST_CASE("signal generators") {
  DelaySet delays({0, 2, 3});

  SwitchingSignal c = gen_signal(SignalKind::Constant, delays, 0, 5, {2});
  CHECK(c.values == std::vector<int>{2, 2, 2, 2, 2});

  SwitchingSignal p = gen_signal(SignalKind::Periodic, delays, 0, 4, {0, 2});
  CHECK(p.values == std::vector<int>{0, 2, 0, 2});

  SwitchingSignal r1 = gen_signal(SignalKind::SeededRandom, delays, 7, 32, {});
  SwitchingSignal r2 = gen_signal(SignalKind::SeededRandom, delays, 7, 32, {});
  CHECK(r1.values == r2.values);
  for (int d : r1.values) CHECK(delays.contains(d));

  SwitchingSignal r3 = gen_signal(SignalKind::SeededRandom, delays, 8, 32, {});
  CHECK(r1.values != r3.values);

  CHECK_THROWS_AS(gen_signal(SignalKind::Constant, delays, 0, 5, {1}), InvalidDelayError);
  CHECK_THROWS_AS(gen_signal(SignalKind::Explicit, delays, 0, 0, {0, 1}), InvalidDelayError);
  CHECK_THROWS_AS(gen_signal(SignalKind::Periodic, delays, 0, 4, {}), std::invalid_argument);
}

TEST_CASE("stepping with a delay outside the set fails") {
  Plant plant(Mat::from_rows({{1.0}}), Mat::from_rows({{1.0}}));
  DelaySet delays({0, 2});
  NetState s = initial_state(plant, delays, {1.0});
  CHECK_THROWS_AS(step(plant, delays, std::monostate{}, s, 1), InvalidDelayError);
}

TEST_CASE("trajectories are linear in the initial state") {
  std::mt19937_64 rng(331);
  for (int rep = 0; rep < 10; ++rep) {
    RandomInstance inst = random_instance(rng);
    SwitchingSignal sig = SwitchingSignal::seeded_random(rng(), 30, inst.delays);
    Vec x0(inst.plant.n()), y0(inst.plant.n());
    for (auto& v : x0) v = uniform(rng, -1.0, 1.0);
    for (auto& v : y0) v = uniform(rng, -1.0, 1.0);
    Vec sum0(x0);
    for (std::size_t i = 0; i < sum0.size(); ++i) sum0[i] += y0[i];

    Trajectory tx = simulate(inst.plant, inst.delays, inst.dep, sig, x0, 30);
    Trajectory ty = simulate(inst.plant, inst.delays, inst.dep, sig, y0, 30);
    Trajectory ts = simulate(inst.plant, inst.delays, inst.dep, sig, sum0, 30);
    for (int t = 0; t <= 30; ++t) {
      Vec expect = extended_state(tx.states[t]);
      Vec other = extended_state(ty.states[t]);
      for (std::size_t i = 0; i < expect.size(); ++i) expect[i] += other[i];
      CHECK(max_abs_diff(expect, extended_state(ts.states[t])) < 1e-9);
    }
  }
}

TEST_CASE("states are unaffected by later signal values") {
  std::mt19937_64 rng(349);
  RandomInstance inst = random_instance(rng);
  Vec x0(inst.plant.n(), 1.0);
  SwitchingSignal a = SwitchingSignal::seeded_random(17, 40, inst.delays);
  SwitchingSignal b = a;
  // rewrite the tail of b
  for (int t = 20; t < 40; ++t) b.values[t] = inst.delays.delays().front();
  Trajectory ta = simulate(inst.plant, inst.delays, inst.indep, a, x0, 40);
  Trajectory tb = simulate(inst.plant, inst.delays, inst.indep, b, x0, 40);
  for (int t = 0; t <= 20; ++t)
    CHECK(max_abs_diff(extended_state(ta.states[t]), extended_state(tb.states[t])) == 0.0);
}

TEST_CASE("divergence is flagged, not thrown") {
  Plant plant(Mat::from_rows({{2.0}}), Mat::from_rows({{1.0}}));
  DelaySet delays({0});
  SwitchingSignal sig = SwitchingSignal::constant(0, 45, delays);
  Trajectory traj = simulate(plant, delays, std::monostate{}, sig, {1.0}, 45);
  CHECK(traj.diverged);
  CHECK(traj.states.size() == 46);
}

TEST_CASE("trajectory CSV layout") {
  Plant plant(Mat::from_rows({{0.5, 0}, {0, 0.5}}), Mat::from_rows({{1.0}, {0.0}}));
  DelaySet delays({0, 1});
  SwitchingSignal sig = SwitchingSignal::constant(1, 1, delays);
  Trajectory traj = simulate(plant, delays, std::monostate{}, sig, {1.0, 0.0}, 1);

  std::ostringstream out;
  write_trajectory_csv(out, traj, plant, delays);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,sigma,x_1,x_2,u_1_1,v_1_1,norm");
  std::getline(in, line);
  CHECK(line.substr(0, 4) == "0,1,");
  std::getline(in, line);
  CHECK(line.substr(0, 3) == "1,,");  // no signal value at the final step
  CHECK_FALSE(std::getline(in, line));
}
