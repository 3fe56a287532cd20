#include "prism/rollout.hpp"

#include <stdexcept>

namespace prism {

DrAxis parse_dr_axis(const std::string& name) {
  if (name == "none") return DrAxis::None;
  if (name == "damping") return DrAxis::Damping;
  if (name == "gain") return DrAxis::Gain;
  if (name == "friction") return DrAxis::Friction;
  throw std::invalid_argument("unknown DR axis: " + name);
}

std::string dr_axis_name(DrAxis axis) {
  switch (axis) {
    case DrAxis::None: return "none";
    case DrAxis::Damping: return "damping";
    case DrAxis::Gain: return "gain";
    case DrAxis::Friction: return "friction";
  }
  return "none";
}

Trajectory rollout_nominal(const State& x0, const EnvSpec& spec, const EnvParams& params,
                           int horizon, Rng rng) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  Trajectory traj;
  traj.dt = params.dt;
  traj.seed = rng.seed();
  traj.params = params;
  traj.states.push_back(x0);
  for (int t = 0; t < horizon; ++t) {
    const double u = nominal_policy(traj.states.back(), spec);
    State next = step(traj.states.back(), u, spec, params, rng);
    traj.states.push_back(std::move(next));
    if (!is_safe(traj.states.back(), spec)) {
      traj.nominal_failure = true;
      break;
    }
  }
  return traj;
}

int label_trigger(const State& x_trig, const EnvSpec& spec, const EnvParams& params,
                  int t_max, Rng rng) {
  if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
  if (!is_safe(x_trig, spec)) return 0;
  if (is_terminal(x_trig, spec)) return 1;
  State x = x_trig;
  for (int t = 0; t < t_max; ++t) {
    const double u = fallback_policy(x, spec, params);
    x = step(x, u, spec, params, rng);
    if (!is_safe(x, spec)) return 0;
    if (is_terminal(x, spec)) return 1;
  }
  return 0;
}

double estimate_vstop(const State& x, const EnvSpec& spec, const EnvParams& params,
                      int t_max, int m, Rng rng) {
  if (m < 1) throw std::invalid_argument("M must be >= 1");
  int hits = 0;
  for (int i = 0; i < m; ++i) {
    hits += label_trigger(x, spec, params, t_max, rng.split("vstop", i));
  }
  return static_cast<double>(hits) / m;
}

EnvParams randomize_env(const EnvParams& base, const DrConfig& dr, Rng& rng) {
  EnvParams out = base;
  switch (dr.axis) {
    case DrAxis::None: break;
    case DrAxis::Damping: out.damping_scale = rng.uniform(dr.lo, dr.hi); break;
    case DrAxis::Gain: out.gain_scale = rng.uniform(dr.lo, dr.hi); break;
    case DrAxis::Friction: out.friction_scale = rng.uniform(dr.lo, dr.hi); break;
  }
  return out;
}

}  // namespace prism
