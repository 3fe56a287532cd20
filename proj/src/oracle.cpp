#include "prism/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace prism {

GridSpec default_grid(const EnvSpec& spec, int res0, int res1) {
  GridSpec g;
  g.axis0 = 0;
  g.axis1 = 1;
  g.lo0 = spec.box_lo[0];
  g.hi0 = spec.box_hi[0];
  g.lo1 = spec.box_lo[1];
  g.hi1 = spec.box_hi[1];
  g.res0 = res0;
  g.res1 = res1;
  g.slice.assign(spec.dimension, 0.0);
  return g;
}

double LabeledGrid::center0(int i) const {
  return spec.lo0 + (i + 0.5) * (spec.hi0 - spec.lo0) / spec.res0;
}

double LabeledGrid::center1(int j) const {
  return spec.lo1 + (j + 0.5) * (spec.hi1 - spec.lo1) / spec.res1;
}

State LabeledGrid::cell_state(int i, int j) const {
  State x = spec.slice;
  x[spec.axis0] = center0(i);
  x[spec.axis1] = center1(j);
  return x;
}

bool analytic_stoppable_braking(const State& x, const EnvSpec& spec,
                                const EnvParams& params, int t_max) {
  if (spec.kind != EnvKind::Braking)
    throw std::invalid_argument("analytic oracle only exists for the braking env");
  if (params.disturbance_sigma != 0.0)
    throw std::invalid_argument("analytic oracle requires sigma = 0");
  if (!is_safe(x, spec)) return false;
  const double v = x[1];
  if (std::abs(v) <= spec.v_terminal) return true;
  const double a_eff =
      std::min(spec.a_max * params.gain_scale, spec.u_max) / params.friction_scale;
  if (std::abs(v) / a_eff > t_max * params.dt) return false;
  if (v > 0.0) return x[0] + v * v / (2.0 * a_eff) < spec.d_obs;
  return true;  // v < 0 brakes away from the obstacle
}

LabeledGrid grid_oracle(const EnvSpec& spec, const EnvParams& base_params,
                        const GridSpec& grid, int m, int t_max, double alpha, Rng rng) {
  if (grid.res0 < 2 || grid.res1 < 2) throw std::invalid_argument("resolution must be >= 2");
  if (m < 1) throw std::invalid_argument("M must be >= 1");
  LabeledGrid out;
  out.spec = grid;
  out.alpha = alpha;
  out.values.resize(static_cast<std::size_t>(grid.res0) * grid.res1);
  out.labels.resize(out.values.size());
  for (int i = 0; i < grid.res0; ++i) {
    for (int j = 0; j < grid.res1; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * grid.res1 + j;
      const State x = out.cell_state(i, j);
      const double v = estimate_vstop(x, spec, base_params, t_max, m, rng.split("cell", idx));
      out.values[idx] = v;
      out.labels[idx] = v >= alpha ? 1 : 0;
    }
  }
  return out;
}

LabeledGrid grid_oracle_dr(const EnvSpec& spec, const EnvParams& base_params,
                           const DrConfig& dr, const GridSpec& grid, int m, int t_max,
                           double alpha, Rng rng) {
  if (grid.res0 < 2 || grid.res1 < 2) throw std::invalid_argument("resolution must be >= 2");
  if (m < 1) throw std::invalid_argument("M must be >= 1");
  LabeledGrid out;
  out.spec = grid;
  out.alpha = alpha;
  out.values.resize(static_cast<std::size_t>(grid.res0) * grid.res1);
  out.labels.resize(out.values.size());
  for (int i = 0; i < grid.res0; ++i) {
    for (int j = 0; j < grid.res1; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * grid.res1 + j;
      const State x = out.cell_state(i, j);
      Rng cell_rng = rng.split("cell", idx);
      int hits = 0;
      for (int k = 0; k < m; ++k) {
        Rng draw = cell_rng.split("rollout", k);
        const EnvParams p = randomize_env(base_params, dr, draw);
        hits += label_trigger(x, spec, p, t_max, draw.split("label"));
      }
      const double v = static_cast<double>(hits) / m;
      out.values[idx] = v;
      out.labels[idx] = v >= alpha ? 1 : 0;
    }
  }
  return out;
}

Agreement agreement(const MonitorParams& params, const LabeledGrid& grid, double alpha) {
  Agreement a;
  std::size_t correct = 0, safe_hit = 0, unsafe_hit = 0, false_safe = 0;
  for (int i = 0; i < grid.spec.res0; ++i) {
    for (int j = 0; j < grid.spec.res1; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * grid.spec.res1 + j;
      const State x = grid.cell_state(i, j);
      const bool pred_stop = decide(forward(params, x), alpha) == Decision::Stoppable;
      const bool oracle_stop = grid.labels[idx] == 1;
      if (oracle_stop) {
        ++a.n_safe;
        if (pred_stop) ++safe_hit;
      } else {
        ++a.n_unsafe;
        if (!pred_stop)
          ++unsafe_hit;
        else
          ++false_safe;
      }
      if (pred_stop == oracle_stop) ++correct;
    }
  }
  const std::size_t total = a.n_safe + a.n_unsafe;
  a.overall_acc = total ? static_cast<double>(correct) / total : 0.0;
  a.safe_acc = a.n_safe ? static_cast<double>(safe_hit) / a.n_safe : 0.0;
  a.unsafe_acc = a.n_unsafe ? static_cast<double>(unsafe_hit) / a.n_unsafe : 0.0;
  a.false_safe_rate = a.n_unsafe ? static_cast<double>(false_safe) / a.n_unsafe : 0.0;
  return a;
}

void write_grid_csv(const LabeledGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[128];
  out << "axis0,axis1,value,label\n";
  for (int i = 0; i < grid.spec.res0; ++i) {
    for (int j = 0; j < grid.spec.res1; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * grid.spec.res1 + j;
      std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%d\n", grid.center0(i),
                    grid.center1(j), grid.values[idx], grid.labels[idx]);
      out << buf;
    }
  }
}

}  // namespace prism
