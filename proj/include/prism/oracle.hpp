#ifndef PRISM_ORACLE_HPP
#define PRISM_ORACLE_HPP

#include <string>
#include <vector>

#include "prism/monitor.hpp"
#include "prism/rollout.hpp"

namespace prism {

// 2-D evaluation grid over two state coordinates; remaining coordinates are
// held at fixed values (the slice).
struct GridSpec {
  int axis0 = 0;
  int axis1 = 1;
  double lo0 = 0.0, hi0 = 1.0;
  double lo1 = 0.0, hi1 = 1.0;
  int res0 = 200;
  int res1 = 200;
  State slice;  // full-dimension template; axis coords are overwritten
};

GridSpec default_grid(const EnvSpec& spec, int res0 = 200, int res1 = 200);

struct LabeledGrid {
  GridSpec spec;
  double alpha = 0.5;
  std::vector<double> values;  // row-major: i0 * res1 + i1, V_stop estimates
  std::vector<int> labels;     // 1 = stoppable at alpha

  double center0(int i) const;
  double center1(int j) const;
  State cell_state(int i, int j) const;
};

// Closed-form stoppability for the deterministic braking env. Ignores the 1%
// linear damping term, so it is an approximate reference with a quantified
// mismatch budget near the boundary.
bool analytic_stoppable_braking(const State& x, const EnvSpec& spec,
                                const EnvParams& params, int t_max);

LabeledGrid grid_oracle(const EnvSpec& spec, const EnvParams& base_params,
                        const GridSpec& grid, int m, int t_max, double alpha, Rng rng);

// as above but with per-rollout domain randomization of the labeling params
LabeledGrid grid_oracle_dr(const EnvSpec& spec, const EnvParams& base_params,
                           const DrConfig& dr, const GridSpec& grid, int m, int t_max,
                           double alpha, Rng rng);

struct Agreement {
  double overall_acc = 0.0;
  double safe_acc = 0.0;        // recall on oracle-stoppable cells
  double unsafe_acc = 0.0;      // recall on oracle-unstoppable cells
  double false_safe_rate = 0.0; // oracle-unstoppable predicted stoppable
  std::size_t n_safe = 0;
  std::size_t n_unsafe = 0;
};

Agreement agreement(const MonitorParams& params, const LabeledGrid& grid, double alpha);

void write_grid_csv(const LabeledGrid& grid, const std::string& path);

}  // namespace prism

#endif
