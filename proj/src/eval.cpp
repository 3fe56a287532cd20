#include "prism/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace prism {

namespace {

// mirrors the training entry of the prism loop at iteration 0 so that the
// baseline reproduces run_prism(k_iters = 0) exactly
MonitorParams train_once(const EnvSpec& spec, const Dataset& d, const PrismConfig& cfg,
                         std::uint64_t seed) {
  Rng root(seed);
  MonitorParams start = init_monitor(cfg.hidden, spec.box_lo, spec.box_hi, root.split("init", 0));
  TrainHyper h = cfg.train;
  h.seed = root.split("train", 0).seed();
  return train(start, d, h).params;
}

Dataset collect_uniform(const EnvSpec& spec, const EnvParams& base_params,
                        const PrismConfig& cfg, int num_traj, int stride,
                        std::uint64_t seed) {
  auto never = [](const State&) { return false; };
  StrideConfig st{stride, std::max(1, stride / 2)};
  Dataset d;
  for (int i = 0; i < num_traj; ++i) {
    Trajectory traj = collect_trajectory(spec, base_params, cfg, seed, i, "traj");
    for (int t : stride_sample(traj, st, never)) {
      TriggerSample ts;
      ts.state = traj.states[t];
      ts.label = label_sample(traj, t, spec, cfg, seed, i, "traj");
      ts.traj_id = traj.id;
      ts.time_index = t;
      ts.iteration = 0;
      ts.params = traj.params;
      d.add(std::move(ts));
    }
  }
  return d;
}

}  // namespace

MetricsRow score_monitor(const MonitorParams& theta, const LabeledGrid& grid, double alpha,
                         const std::string& experiment) {
  Agreement a = agreement(theta, grid, alpha);
  MetricsRow row;
  row.experiment = experiment;
  row.safe_acc = 100.0 * a.safe_acc;
  row.unsafe_acc = 100.0 * a.unsafe_acc;
  row.false_safe_rate = 100.0 * a.false_safe_rate;
  return row;
}

BaselineResult baseline_uniform(const EnvSpec& spec, const EnvParams& base_params,
                                const PrismConfig& cfg, const BaselineBudget& budget,
                                std::uint64_t seed, const LabeledGrid* grid) {
  if (budget.num_traj < 1 || budget.stride < 1)
    throw std::invalid_argument("baseline budget must be positive");
  BaselineResult res;
  res.data = collect_uniform(spec, base_params, cfg, budget.num_traj, budget.stride, seed);
  if (res.data.n_safe() == 0 || res.data.n_unsafe() == 0)
    throw DegenerateDatasetError("uniform baseline collected a single-class dataset");
  res.monitor = train_once(spec, res.data, cfg, seed);

  res.row.experiment = "baseline_uniform";
  if (grid) res.row = score_monitor(res.monitor, *grid, cfg.alpha, "baseline_uniform");
  res.row.total_data = res.data.size();
  res.row.unsafe_ratio = res.data.unsafe_ratio();
  res.row.num_traj = budget.num_traj;
  return res;
}

int match_budget_num_traj(const EnvSpec& spec, const EnvParams& base_params,
                          const PrismConfig& cfg, int stride, std::size_t target,
                          std::uint64_t seed, int max_traj) {
  auto never = [](const State&) { return false; };
  StrideConfig st{stride, std::max(1, stride / 2)};
  std::size_t total = 0;
  std::size_t best_err = target;  // error of the empty prefix
  int best_n = 1;
  for (int n = 1; n <= max_traj; ++n) {
    Trajectory traj = collect_trajectory(spec, base_params, cfg, seed, n - 1, "traj");
    total += stride_sample(traj, st, never).size();
    const std::size_t err = total > target ? total - target : target - total;
    if (err < best_err || n == 1) {
      best_err = err;
      best_n = n;
    }
    if (total >= target) break;
  }
  return best_n;
}

std::vector<MetricsRow> alpha_sweep(const MonitorParams& theta, const LabeledGrid& grid,
                                    const std::vector<double>& alphas) {
  std::vector<MetricsRow> rows;
  char name[64];
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("alpha must be in (0,1]");
    std::snprintf(name, sizeof(name), "alpha=%.10g", a);
    rows.push_back(score_monitor(theta, grid, a, name));
  }
  return rows;
}

std::vector<MetricsRow> dr_ablation(const MonitorParams& theta, const EnvSpec& spec,
                                    const EnvParams& base_params,
                                    const std::vector<DrConfig>& dr_list,
                                    const GridSpec& grid, int m, int t_max, double alpha,
                                    std::uint64_t seed) {
  std::vector<MetricsRow> rows;
  Rng root(seed);
  char name[96];
  for (std::size_t i = 0; i < dr_list.size(); ++i) {
    const DrConfig& dr = dr_list[i];
    LabeledGrid g = dr.axis == DrAxis::None
                        ? grid_oracle(spec, base_params, grid, m, t_max, alpha,
                                      root.split("oracle", i))
                        : grid_oracle_dr(spec, base_params, dr, grid, m, t_max, alpha,
                                         root.split("oracle", i));
    std::snprintf(name, sizeof(name), "dr=%s[%.10g,%.10g]", dr_axis_name(dr.axis).c_str(),
                  dr.lo, dr.hi);
    rows.push_back(score_monitor(theta, g, alpha, name));
  }
  return rows;
}

Dataset balance_classes(const Dataset& d, Rng rng) {
  const bool majority_is_safe = d.n_safe() > d.n_unsafe();
  const std::size_t n_min = std::min(d.n_safe(), d.n_unsafe());
  std::vector<std::size_t> majority;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if ((d.samples()[i].label == 1) == majority_is_safe) majority.push_back(i);
  }
  for (std::size_t i = majority.empty() ? 0 : majority.size() - 1; i > 0; --i)
    std::swap(majority[i], majority[rng.index(i + 1)]);
  std::vector<char> keep(d.size(), 0);
  for (std::size_t i = 0; i < d.size(); ++i)
    if ((d.samples()[i].label == 1) != majority_is_safe) keep[i] = 1;
  for (std::size_t k = 0; k < n_min && k < majority.size(); ++k) keep[majority[k]] = 1;

  Dataset out;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (keep[i]) out.add(d.samples()[i]);
  return out;
}

std::vector<MetricsRow> stride_ablation(const EnvSpec& spec, const EnvParams& base_params,
                                        const PrismConfig& cfg,
                                        const std::vector<int>& strides, int num_traj,
                                        const LabeledGrid& grid, std::uint64_t seed) {
  std::vector<MetricsRow> rows;
  Rng root(seed);
  char name[64];
  // all strides subsample the same underlying trajectories, so data volume
  // varies with the stride alone
  for (int stride : strides) {
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    Dataset raw = collect_uniform(spec, base_params, cfg, num_traj, stride, seed);
    if (raw.n_safe() == 0 || raw.n_unsafe() == 0)
      throw DegenerateDatasetError("stride ablation collected a single-class dataset");
    Dataset balanced = balance_classes(raw, root.split("balance", stride));
    MonitorParams theta = train_once(spec, balanced, cfg, seed);

    std::snprintf(name, sizeof(name), "stride=%d", stride);
    MetricsRow row = score_monitor(theta, grid, cfg.alpha, name);
    row.total_data = raw.size();
    row.unsafe_ratio = raw.unsafe_ratio();
    row.num_traj = num_traj;
    rows.push_back(row);
  }
  return rows;
}

std::vector<TracePoint> score_trace(const MonitorParams& theta, const Trajectory& traj,
                                    const EnvSpec& spec, int t_max, int m, double alpha,
                                    Rng rng) {
  std::vector<TracePoint> out;
  out.reserve(traj.states.size());
  for (std::size_t t = 0; t < traj.states.size(); ++t) {
    TracePoint p;
    p.t = static_cast<int>(t);
    p.v_hat = forward(theta, traj.states[t]);
    const double v = estimate_vstop(traj.states[t], spec, traj.params, t_max, m,
                                    rng.split("vstop", t));
    p.oracle_label = v >= alpha ? 1 : 0;
    out.push_back(p);
  }
  return out;
}

void write_trace_csv(const std::vector<TracePoint>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "t,v_hat,oracle_label\n";
  char buf[96];
  for (const auto& p : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.10g,%d\n", p.t, p.v_hat, p.oracle_label);
    out << buf;
  }
}

void export_value_grid(const MonitorParams& theta, const GridSpec& grid,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "axis0,axis1,v_hat\n";
  LabeledGrid g;
  g.spec = grid;
  char buf[128];
  for (int i = 0; i < grid.res0; ++i) {
    for (int j = 0; j < grid.res1; ++j) {
      const double v = forward(theta, g.cell_state(i, j));
      std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", g.center0(i), g.center1(j), v);
      out << buf;
    }
  }
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "experiment,fingerprint,total_data,unsafe_ratio,num_traj,safe_acc,unsafe_acc,"
         "false_safe_rate\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%zu,%.10g,%d,%.10g,%.10g,%.10g\n",
                  r.experiment.c_str(), r.fingerprint.c_str(), r.total_data, r.unsafe_ratio,
                  r.num_traj, r.safe_acc, r.unsafe_acc, r.false_safe_rate);
    out << buf;
  }
}

}  // namespace prism
