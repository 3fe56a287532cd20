#include "prism/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prism {

EnvSpec make_braking_spec() {
  EnvSpec s;
  s.kind = EnvKind::Braking;
  s.name = "braking";
  s.dimension = 2;
  s.u_max = 2.0;
  s.box_lo = {0.0, -0.5};
  s.box_hi = {10.0, 3.5};
  return s;
}

EnvSpec make_cartpole_spec() {
  EnvSpec s;
  s.kind = EnvKind::CartPole;
  s.name = "cartpole";
  s.dimension = 4;
  s.u_max = 10.0;
  s.box_lo = {-1.2, -3.0, -2.4, -3.0};
  s.box_hi = {1.2, 3.0, 2.4, 3.0};
  return s;
}

EnvSpec make_spec(const std::string& name) {
  if (name == "braking") return make_braking_spec();
  if (name == "cartpole") return make_cartpole_spec();
  throw std::invalid_argument("unknown environment: " + name);
}

double clamp_control(double u, const EnvSpec& spec) {
  return std::clamp(u, -spec.u_max, spec.u_max);
}

static void check_dim(const State& x, const EnvSpec& spec) {
  if (static_cast<int>(x.size()) != spec.dimension)
    throw std::invalid_argument("state dimension mismatch for env " + spec.name);
}

State step(const State& x, double u, const EnvSpec& spec, const EnvParams& params,
           Rng& rng) {
  check_dim(x, spec);
  u = clamp_control(u, spec);
  const double dt = params.dt;
  // higher friction_scale degrades actuation effectiveness
  const double u_eff = u / params.friction_scale;
  const double sigma = params.disturbance_sigma;

  if (spec.kind == EnvKind::Braking) {
    const double p = x[0], v = x[1];
    double v_next = v + u_eff * dt - params.damping_scale * 0.01 * v * dt;
    if (sigma > 0.0) v_next += sigma * rng.normal();
    return {p + v * dt, v_next};
  }

  // cart-pole, Euler step
  const double th = x[0], om = x[1], c = x[2], cd = x[3];
  const double mp = spec.pole_mass, mc = spec.cart_mass, l = spec.pole_len;
  const double mt = mp + mc;
  const double b = spec.joint_damping * params.damping_scale;
  const double s = std::sin(th), co = std::cos(th);
  const double temp = (u_eff + mp * l * om * om * s) / mt;
  const double th_dd = (spec.gravity * s - co * temp - b * om / (mp * l)) /
                       (l * (4.0 / 3.0 - mp * co * co / mt));
  const double c_dd = temp - mp * l * th_dd * co / mt;
  double om_next = om + th_dd * dt;
  double cd_next = cd + c_dd * dt;
  if (sigma > 0.0) {
    om_next += sigma * rng.normal();
    cd_next += sigma * rng.normal();
  }
  return {th + om * dt, om_next, c + cd * dt, cd_next};
}

double nominal_policy(const State& x, const EnvSpec& spec) {
  check_dim(x, spec);
  if (spec.kind == EnvKind::Braking) {
    const double p = x[0], v = x[1];
    if (p > spec.coast_p) return 0.0;
    return clamp_control(spec.k_v * (spec.v_ref - v), spec);
  }
  const double th = x[0], om = x[1], c = x[2], cd = x[3];
  const double u = spec.nom_kp * th + spec.nom_kd * om +
                   spec.nom_osc * (spec.nom_amp * spec.nom_amp - c * c) * cd -
                   spec.nom_kspr * c;
  return clamp_control(u, spec);
}

double fallback_policy(const State& x, const EnvSpec& spec, const EnvParams& params) {
  check_dim(x, spec);
  if (spec.kind == EnvKind::Braking) {
    const double v = x[1];
    const double sgn = (v > 0.0) - (v < 0.0);
    return clamp_control(-sgn * spec.a_max * params.gain_scale, spec);
  }
  const double u = params.gain_scale * (spec.fb_kp * x[0] + spec.fb_kd * x[1] +
                                        spec.fb_kc * x[2] + spec.fb_kcd * x[3]);
  return clamp_control(u, spec);
}

bool is_safe(const State& x, const EnvSpec& spec) {
  check_dim(x, spec);
  if (spec.kind == EnvKind::Braking) return x[0] < spec.d_obs;
  return std::abs(x[0]) < spec.theta_safe && std::abs(x[2]) < spec.c_safe;
}

bool is_terminal(const State& x, const EnvSpec& spec) {
  if (!is_safe(x, spec)) return false;
  if (spec.kind == EnvKind::Braking) return std::abs(x[1]) <= spec.v_terminal;
  return std::abs(x[0]) <= spec.theta_terminal && std::abs(x[1]) <= spec.omega_terminal;
}

State sample_initial_state(const EnvSpec& spec, Rng& rng) {
  if (spec.kind == EnvKind::Braking) {
    return {rng.uniform(0.0, 0.5), rng.uniform(0.0, 0.2)};
  }
  // spread start poses over a sizable patch of the upright basin so the
  // nominal distribution exercises both label classes across the state box
  return {rng.uniform(-0.5, 0.5), rng.uniform(-1.2, 1.2),
          rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
}

}  // namespace prism
