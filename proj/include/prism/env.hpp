#ifndef PRISM_ENV_HPP
#define PRISM_ENV_HPP

#include <string>
#include <vector>

#include "prism/rng.hpp"

namespace prism {

// Dense state vector. Braking env: [p, v]. Cart-pole env: [theta, theta_dot, c, c_dot].
using State = std::vector<double>;

enum class EnvKind { Braking, CartPole };

struct EnvParams {
  double damping_scale = 1.0;
  double gain_scale = 1.0;
  double friction_scale = 1.0;
  double disturbance_sigma = 0.0;
  double dt = 0.01;
};

struct EnvSpec {
  EnvKind kind = EnvKind::Braking;
  std::string name;
  int dimension = 0;
  double u_max = 0.0;

  // per-coordinate bounds of the nominal state box (monitor normalization
  // and oracle grids use these)
  std::vector<double> box_lo;
  std::vector<double> box_hi;

  // braking
  double d_obs = 9.0;        // obstacle position, safe iff p < d_obs
  double v_terminal = 0.05;  // |v| tolerance for terminal
  double a_max = 2.0;        // fallback braking deceleration
  double v_ref = 2.5;        // nominal cruise speed
  double k_v = 1.0;          // nominal proportional gain
  double coast_p = 8.0;      // nominal coasts past this position

  // cart-pole
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double pole_len = 0.5;  // half-length
  double gravity = 9.81;
  double theta_safe = 1.5707963267948966;  // pi/2
  double c_safe = 2.4;
  double theta_terminal = 0.05;
  double omega_terminal = 0.05;
  double joint_damping = 0.02;  // scaled by damping_scale
  double fb_kp = 56.0;          // fallback LQR-style gains, scaled by gain_scale
  double fb_kd = 13.4;
  double fb_kc = 4.5;   // cart position term
  double fb_kcd = 7.2;  // cart velocity term
  double nom_kp = 25.0;  // nominal weak pole PD
  double nom_kd = 2.0;
  double nom_osc = 1.0;   // van der Pol cart excitation strength
  double nom_amp = 1.8;   // target cart oscillation amplitude
  double nom_kspr = 3.0;  // cart spring term, sets the oscillation frequency
};

EnvSpec make_braking_spec();
EnvSpec make_cartpole_spec();
EnvSpec make_spec(const std::string& name);

double clamp_control(double u, const EnvSpec& spec);

State step(const State& x, double u, const EnvSpec& spec, const EnvParams& params,
           Rng& rng);
double nominal_policy(const State& x, const EnvSpec& spec);
double fallback_policy(const State& x, const EnvSpec& spec, const EnvParams& params);
bool is_safe(const State& x, const EnvSpec& spec);
bool is_terminal(const State& x, const EnvSpec& spec);
State sample_initial_state(const EnvSpec& spec, Rng& rng);

}  // namespace prism

#endif
