#ifndef PRISM_ROLLOUT_HPP
#define PRISM_ROLLOUT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "prism/env.hpp"
#include "prism/rng.hpp"

namespace prism {

struct Trajectory {
  std::vector<State> states;
  double dt = 0.01;
  std::uint64_t seed = 0;
  EnvParams params;
  std::string id;
  bool nominal_failure = false;  // rollout halted on a safety violation

  // States eligible for trigger sampling. The violating state, when present,
  // is stored but excluded.
  std::size_t sampling_length() const {
    return nominal_failure ? states.size() - 1 : states.size();
  }
};

enum class DrAxis { None, Damping, Gain, Friction };

struct DrConfig {
  DrAxis axis = DrAxis::None;
  double lo = 1.0;
  double hi = 1.0;
};

DrAxis parse_dr_axis(const std::string& name);
std::string dr_axis_name(DrAxis axis);

Trajectory rollout_nominal(const State& x0, const EnvSpec& spec, const EnvParams& params,
                           int horizon, Rng rng);

// Single fallback rollout from a trigger state; 1 iff the terminal set is
// reached within t_max steps with every visited state safe.
int label_trigger(const State& x_trig, const EnvSpec& spec, const EnvParams& params,
                  int t_max, Rng rng);

// Monte-Carlo estimate of V_stop: mean of M independent labeling rollouts.
double estimate_vstop(const State& x, const EnvSpec& spec, const EnvParams& params,
                      int t_max, int m, Rng rng);

EnvParams randomize_env(const EnvParams& base, const DrConfig& dr, Rng& rng);

}  // namespace prism

#endif
