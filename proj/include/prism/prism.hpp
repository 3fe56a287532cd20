#ifndef PRISM_PRISM_HPP
#define PRISM_PRISM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "prism/dataset.hpp"
#include "prism/monitor.hpp"

namespace prism {

struct PrismConfig {
  double alpha = 0.5;  // decision threshold, (0, 1]
  double beta = 0.5;   // mixture weight, [0, 1)
  double delta = 0.1;  // quantile tail, (0, 1)
  int n0 = 3;          // initial trajectories
  int n_i = 3;         // trajectories per iteration
  int k_iters = 10;
  int n_val = 5;
  StrideConfig strides;
  int t_max = 500;    // fallback rollout horizon (steps)
  int horizon = 600;  // nominal rollout horizon (steps)
  DrConfig dr;
  TrainHyper train;
  std::vector<int> hidden{64, 64};
  bool warm_start = false;
  double band_fallback_lo = 0.35;
  double band_fallback_hi = 0.65;

  void validate() const;  // throws std::invalid_argument
};

struct UncertaintyBand {
  double p_lo = 0.0;
  double p_hi = 1.0;
};

struct IterationMetrics {
  int iter = 0;
  std::size_t total_data = 0;
  double unsafe_ratio = 0.0;
  int num_traj = 0;
  double safe_acc = 0.0;    // validation accuracy on label-1 samples
  double unsafe_acc = 0.0;  // validation accuracy on label-0 samples
  double quantile = 0.0;
  double band_lo = 0.0;
  double band_hi = 0.0;
  // realized densification on the region-adaptive trajectories of this
  // iteration: fraction of sampled states inside the band, adaptive vs the
  // coarse striding of the same trajectories
  double band_frac_adaptive = 0.0;
  double band_frac_coarse = 0.0;
  bool band_degenerate = true;
};

struct PrismState {
  int iteration = 0;
  MonitorParams theta;
  Dataset buffer;
  Dataset validation;
  double quantile = 0.0;
  std::vector<IterationMetrics> history;
  int traj_counter = 0;  // global trajectory index, drives seed splitting
};

struct PrismResult {
  MonitorParams monitor;
  std::vector<IterationMetrics> history;
  Dataset buffer;
  Dataset validation;
};

// per-sample weighted BCE residuals, aligned with d_val.samples()
std::vector<double> residuals(const MonitorParams& theta, const Dataset& d_val,
                              std::pair<double, double> w);

// order statistic at ceil(level * n) of the ascending sort (conformal convention)
double quantile(std::vector<double> values, double level);

UncertaintyBand uncertainty_band(double q, double fallback_lo = 0.35,
                                 double fallback_hi = 0.65);

PrismState init_prism(const EnvSpec& spec, const EnvParams& base_params,
                      const PrismConfig& cfg, std::uint64_t seed);

PrismState refine_iteration(PrismState s, const EnvSpec& spec, const EnvParams& base_params,
                            const PrismConfig& cfg, std::uint64_t seed);

PrismResult run_prism(const EnvSpec& spec, const EnvParams& base_params,
                      const PrismConfig& cfg, std::uint64_t seed);

void write_history_csv(const std::vector<IterationMetrics>& history, const std::string& path);

// shared trajectory/label seed-splitting helpers (the uniform baseline reuses
// them so that it is bit-identical to run_prism at k_iters = 0)
Trajectory collect_trajectory(const EnvSpec& spec, const EnvParams& base_params,
                              const PrismConfig& cfg, std::uint64_t seed, int index,
                              const std::string& id_prefix);
int label_sample(const Trajectory& traj, int t, const EnvSpec& spec,
                 const PrismConfig& cfg, std::uint64_t seed, int traj_index,
                 const std::string& id_prefix);

}  // namespace prism

#endif
