#include <doctest.h>

#include <cmath>

#include "prism/rollout.hpp"

using namespace prism;

TEST_CASE("single-step nominal rollout matches step + nominal_policy") {
  auto spec = make_braking_spec();
  EnvParams p;
  State x0{0.0, 0.0};
  Trajectory traj = rollout_nominal(x0, spec, p, 1, Rng(9));
  REQUIRE(traj.states.size() == 2);
  Rng r(9);
  State expect = step(x0, nominal_policy(x0, spec), spec, p, r);
  CHECK(traj.states[1] == expect);
}

TEST_CASE("deterministic braking rollout ends in the coast band") {
  auto spec = make_braking_spec();
  EnvParams p;  // sigma = 0
  Trajectory traj = rollout_nominal({0.0, 0.0}, spec, p, 600, Rng(1));
  // the aggressive nominal policy runs into the obstacle; the last state
  // eligible for trigger sampling sits just below it
  const double p_final = traj.states[traj.sampling_length() - 1][0];
  CHECK(p_final >= 7.5);
  CHECK(p_final < 9.0);
  // regression pin: flag any change to the deterministic dynamics
  CHECK(p_final == doctest::Approx(8.9884047545719294).epsilon(1e-12));
  CHECK(traj.states.size() == 466);
  CHECK(traj.nominal_failure);
}

TEST_CASE("identical inputs give bit-identical trajectories") {
  auto spec = make_braking_spec();
  EnvParams p;
  p.disturbance_sigma = 0.05;
  Trajectory a = rollout_nominal({0.1, 0.05}, spec, p, 300, Rng(77));
  Trajectory b = rollout_nominal({0.1, 0.05}, spec, p, 300, Rng(77));
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i) CHECK(a.states[i] == b.states[i]);
}

TEST_CASE("label_trigger base cases") {
  auto spec = make_braking_spec();
  EnvParams p;
  CHECK(label_trigger({5.0, 0.0}, spec, p, 500, Rng(1)) == 1);  // already terminal
  CHECK(label_trigger({9.5, 0.0}, spec, p, 500, Rng(1)) == 0);  // already unsafe
  // braking distance 1.0 from v=2: stop point 9.5 >= 9.0
  CHECK(label_trigger({8.5, 2.0}, spec, p, 500, Rng(1)) == 0);
  // stop point 6.0 < 9.0, stop time 1 s
  CHECK(label_trigger({5.0, 2.0}, spec, p, 500, Rng(1)) == 1);
}

TEST_CASE("labels are reproducible under a fixed seed") {
  auto spec = make_braking_spec();
  EnvParams p;
  p.disturbance_sigma = 0.05;
  for (int i = 0; i < 20; ++i) {
    State x{6.0 + 0.1 * i, 1.5};
    CHECK(label_trigger(x, spec, p, 500, Rng(i)) == label_trigger(x, spec, p, 500, Rng(i)));
  }
}

TEST_CASE("estimate_vstop is exact in the deterministic env") {
  auto spec = make_braking_spec();
  EnvParams p;
  CHECK(estimate_vstop({5.0, 2.0}, spec, p, 500, 7, Rng(3)) == doctest::Approx(1.0));
  CHECK(estimate_vstop({8.5, 2.0}, spec, p, 500, 7, Rng(3)) == doctest::Approx(0.0));
}

TEST_CASE("estimate_vstop stays in [0,1] and concentrates with M") {
  auto spec = make_braking_spec();
  EnvParams p;
  p.disturbance_sigma = 0.05;
  State boundary{7.4, 2.5};
  double lo = estimate_vstop(boundary, spec, p, 500, 50, Rng(10));
  CHECK(lo >= 0.0);
  CHECK(lo <= 1.0);
  double a = estimate_vstop(boundary, spec, p, 500, 400, Rng(11));
  double b = estimate_vstop(boundary, spec, p, 500, 400, Rng(12));
  CHECK(std::abs(a - b) < 0.12);  // ~4.8 sigma at p(1-p) <= 1/4
}

TEST_CASE("randomize_env: identity, support, single-factor isolation") {
  EnvParams base;
  Rng rng(4);

  DrConfig none;
  EnvParams same = randomize_env(base, none, rng);
  CHECK(same.damping_scale == base.damping_scale);
  CHECK(same.friction_scale == base.friction_scale);

  DrConfig friction{DrAxis::Friction, 0.4, 2.0};
  DrConfig damping{DrAxis::Damping, 0.7, 1.3};
  for (int i = 0; i < 10000; ++i) {
    EnvParams f = randomize_env(base, friction, rng);
    CHECK(f.friction_scale >= 0.4);
    CHECK(f.friction_scale <= 2.0);
    CHECK(f.damping_scale == base.damping_scale);
    CHECK(f.gain_scale == base.gain_scale);

    EnvParams d = randomize_env(base, damping, rng);
    CHECK(d.damping_scale >= 0.7);
    CHECK(d.damping_scale <= 1.3);
    CHECK(d.friction_scale == base.friction_scale);
  }
}

TEST_CASE("label invariants over random states") {
  auto spec = make_braking_spec();
  EnvParams p;
  p.disturbance_sigma = 0.03;
  Rng rng(21);
  for (int i = 0; i < 2000; ++i) {
    State x{rng.uniform(-1.0, 11.0), rng.uniform(-1.0, 4.0)};
    if (is_terminal(x, spec)) CHECK(label_trigger(x, spec, p, 500, rng.split("l", i)) == 1);
    if (!is_safe(x, spec)) CHECK(label_trigger(x, spec, p, 500, rng.split("m", i)) == 0);
  }
}

TEST_CASE("cartpole nominal rollouts produce both label classes") {
  auto spec = make_cartpole_spec();
  EnvParams p;
  p.disturbance_sigma = 0.02;
  Rng rng(1);
  int n_safe = 0, n_unsafe = 0;
  for (int s = 0; s < 4; ++s) {
    Rng init = rng.split("x0", s);
    Trajectory traj =
        rollout_nominal(sample_initial_state(spec, init), spec, p, 1200, rng.split("dyn", s));
    for (std::size_t t = 0; t < traj.sampling_length(); t += 15) {
      int y = label_trigger(traj.states[t], spec, p, 800, rng.split("lab", s * 1000 + t));
      (y == 1 ? n_safe : n_unsafe)++;
    }
  }
  CHECK(n_safe > 0);
  CHECK(n_unsafe > 0);
}
