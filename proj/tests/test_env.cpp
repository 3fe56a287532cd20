#include <doctest.h>

#include <cmath>

#include "prism/env.hpp"

using namespace prism;

namespace {
EnvParams quiet() {
  EnvParams p;
  p.disturbance_sigma = 0.0;
  return p;
}
}  // namespace

TEST_CASE("braking step: fixed point of zero dynamics") {
  auto spec = make_braking_spec();
  Rng rng(1);
  State x = step({0.0, 0.0}, 0.0, spec, quiet(), rng);
  CHECK(x[0] == doctest::Approx(0.0));
  CHECK(x[1] == doctest::Approx(0.0));
}

TEST_CASE("braking step: hand-evaluated Euler steps") {
  auto spec = make_braking_spec();
  Rng rng(1);
  State a = step({5.0, 2.0}, 0.0, spec, quiet(), rng);
  CHECK(a[0] == doctest::Approx(5.02).epsilon(1e-12));
  CHECK(a[1] == doctest::Approx(1.9998).epsilon(1e-12));

  State b = step({5.0, 2.0}, -2.0, spec, quiet(), rng);
  CHECK(b[0] == doctest::Approx(5.02).epsilon(1e-12));
  CHECK(b[1] == doctest::Approx(1.9798).epsilon(1e-12));
}

TEST_CASE("braking step is deterministic given identical seeds") {
  auto spec = make_braking_spec();
  EnvParams p = quiet();
  p.disturbance_sigma = 0.1;
  Rng r1(42), r2(42);
  State a = step({3.0, 1.0}, 0.5, spec, p, r1);
  State b = step({3.0, 1.0}, 0.5, spec, p, r2);
  CHECK(a[0] == b[0]);
  CHECK(a[1] == b[1]);
}

TEST_CASE("nominal policy: braking cases") {
  auto spec = make_braking_spec();
  CHECK(nominal_policy({0.0, 2.5}, spec) == doctest::Approx(0.0));
  CHECK(nominal_policy({0.0, 0.0}, spec) == doctest::Approx(2.0));  // clamped from 2.5
  CHECK(nominal_policy({8.5, 2.5}, spec) == doctest::Approx(0.0));  // coast region
}

TEST_CASE("fallback policy: braking cases") {
  auto spec = make_braking_spec();
  EnvParams p = quiet();
  CHECK(fallback_policy({5.0, 2.0}, spec, p) == doctest::Approx(-2.0));
  CHECK(fallback_policy({5.0, 0.0}, spec, p) == doctest::Approx(0.0));
  p.gain_scale = 0.5;
  CHECK(fallback_policy({5.0, -1.0}, spec, p) == doctest::Approx(1.0));
}

TEST_CASE("safe and terminal predicates, braking") {
  auto spec = make_braking_spec();
  CHECK(is_safe({8.99, 5.0}, spec));
  CHECK_FALSE(is_safe({9.0, 0.0}, spec));
  CHECK_FALSE(is_safe({10.0, -1.0}, spec));

  CHECK(is_terminal({5.0, 0.0}, spec));
  CHECK_FALSE(is_terminal({5.0, 0.06}, spec));
  CHECK_FALSE(is_terminal({9.5, 0.0}, spec));
}

TEST_CASE("terminal set is contained in the safe set (random sampling)") {
  for (const auto& name : {"braking", "cartpole"}) {
    auto spec = make_spec(name);
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
      State x(spec.dimension);
      for (int d = 0; d < spec.dimension; ++d)
        x[d] = rng.uniform(spec.box_lo[d] - 1.0, spec.box_hi[d] + 1.0);
      if (is_terminal(x, spec)) CHECK(is_safe(x, spec));
    }
  }
}

TEST_CASE("initial state sampling: determinism, support, mean") {
  auto spec = make_braking_spec();
  {
    Rng a(5), b(5);
    CHECK(sample_initial_state(spec, a) == sample_initial_state(spec, b));
  }
  Rng rng(11);
  double sum_p = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    State x = sample_initial_state(spec, rng);
    CHECK(x[0] >= 0.0);
    CHECK(x[0] <= 0.5);
    CHECK(x[1] >= 0.0);
    CHECK(x[1] <= 0.2);
    sum_p += x[0];
  }
  CHECK(sum_p / n == doctest::Approx(0.25).epsilon(0.08));
}

TEST_CASE("policy outputs respect actuation bounds") {
  for (const auto& name : {"braking", "cartpole"}) {
    auto spec = make_spec(name);
    EnvParams p = quiet();
    p.gain_scale = 3.0;
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
      State x(spec.dimension);
      for (int d = 0; d < spec.dimension; ++d)
        x[d] = rng.uniform(2 * spec.box_lo[d], 2 * spec.box_hi[d]);
      CHECK(std::abs(nominal_policy(x, spec)) <= spec.u_max + 1e-12);
      CHECK(std::abs(fallback_policy(x, spec, p)) <= spec.u_max + 1e-12);
    }
  }
}

TEST_CASE("braking fallback: speed is non-increasing without noise") {
  auto spec = make_braking_spec();
  EnvParams p = quiet();
  State x{2.0, 3.0};
  Rng rng(1);
  for (int t = 0; t < 400; ++t) {
    double v_prev = std::abs(x[1]);
    x = step(x, fallback_policy(x, spec, p), spec, p, rng);
    if (v_prev > spec.a_max * p.dt) CHECK(std::abs(x[1]) <= v_prev + 1e-12);
  }
  CHECK(std::abs(x[1]) <= spec.a_max * p.dt);
}
