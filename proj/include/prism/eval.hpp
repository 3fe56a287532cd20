#ifndef PRISM_EVAL_HPP
#define PRISM_EVAL_HPP

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "prism/oracle.hpp"
#include "prism/prism.hpp"

namespace prism {

// one table row; accuracy fields are percentages in [0, 100]
struct MetricsRow {
  std::string experiment;
  std::string fingerprint;
  std::size_t total_data = 0;
  double unsafe_ratio = 0.0;
  int num_traj = 0;
  double safe_acc = 0.0;
  double unsafe_acc = 0.0;
  double false_safe_rate = 0.0;
  double wall_time = 0.0;  // informational; excluded from deterministic exports
};

MetricsRow score_monitor(const MonitorParams& theta, const LabeledGrid& grid, double alpha,
                         const std::string& experiment);

struct BaselineBudget {
  int num_traj = 3;
  int stride = 20;
};

struct BaselineResult {
  MonitorParams monitor;
  Dataset data;
  MetricsRow row;
};

// Uniform-stride training at a fixed trajectory budget. Reuses the same
// trajectory/label seed streams as run_prism, so (num_traj = n0,
// stride = coarse) reproduces run_prism with k_iters = 0 bit for bit.
// `grid` is optional; without it only the data columns of the row are filled.
BaselineResult baseline_uniform(const EnvSpec& spec, const EnvParams& base_params,
                                const PrismConfig& cfg, const BaselineBudget& budget,
                                std::uint64_t seed, const LabeledGrid* grid = nullptr);

// Smallest-error trajectory count whose uniform-stride sample total best
// matches `target`. Counts stride indices only; no labeling rollouts.
int match_budget_num_traj(const EnvSpec& spec, const EnvParams& base_params,
                          const PrismConfig& cfg, int stride, std::size_t target,
                          std::uint64_t seed, int max_traj = 2000);

std::vector<MetricsRow> alpha_sweep(const MonitorParams& theta, const LabeledGrid& grid,
                                    const std::vector<double>& alphas);

// zero-shot scoring of a fixed monitor against oracles re-labeled under each
// perturbed parameter distribution
std::vector<MetricsRow> dr_ablation(const MonitorParams& theta, const EnvSpec& spec,
                                    const EnvParams& base_params,
                                    const std::vector<DrConfig>& dr_list,
                                    const GridSpec& grid, int m, int t_max, double alpha,
                                    std::uint64_t seed);

// uniform-stride runs on class-balanced subsets; total_data reports the raw
// labeled volume before balancing
std::vector<MetricsRow> stride_ablation(const EnvSpec& spec, const EnvParams& base_params,
                                        const PrismConfig& cfg,
                                        const std::vector<int>& strides, int num_traj,
                                        const LabeledGrid& grid, std::uint64_t seed);

struct TracePoint {
  int t = 0;
  double v_hat = 0.0;
  int oracle_label = 0;
};

std::vector<TracePoint> score_trace(const MonitorParams& theta, const Trajectory& traj,
                                    const EnvSpec& spec, int t_max, int m, double alpha,
                                    Rng rng);
void write_trace_csv(const std::vector<TracePoint>& trace, const std::string& path);

void export_value_grid(const MonitorParams& theta, const GridSpec& grid,
                       const std::string& path);

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path);

// seeded uniform subsample of the majority class down to the minority count
Dataset balance_classes(const Dataset& d, Rng rng);

}  // namespace prism

#endif
