#include "prism/prism.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace prism {

void PrismConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0,1]");
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("beta must be in [0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  if (n0 < 1) throw std::invalid_argument("n0 must be >= 1");
  if (n_i < 1) throw std::invalid_argument("n_i must be >= 1");
  if (k_iters < 0) throw std::invalid_argument("k_iters must be >= 0");
  if (n_val < 1) throw std::invalid_argument("n_val must be >= 1");
  if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (strides.fine < 1 || strides.fine >= strides.coarse)
    throw std::invalid_argument("strides must satisfy 1 <= fine < coarse");
  if (dr.lo <= 0.0 || dr.lo > dr.hi)
    throw std::invalid_argument("DR range must satisfy 0 < lo <= hi");
  if (train.learning_rate <= 0.0 || train.batch_size < 1 || train.epochs < 1)
    throw std::invalid_argument("training hyperparameters must be positive");
}

std::vector<double> residuals(const MonitorParams& theta, const Dataset& d_val,
                              std::pair<double, double> w) {
  if (d_val.empty()) throw std::invalid_argument("empty validation set");
  std::vector<double> out;
  out.reserve(d_val.size());
  for (const auto& s : d_val.samples()) {
    const double v = forward(theta, s.state);
    out.push_back(sample_loss(v, s.label, s.label == 1 ? w.second : w.first));
  }
  return out;
}

double quantile(std::vector<double> values, double level) {
  if (values.empty()) throw std::invalid_argument("empty value list");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must be in (0,1)");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::size_t k = static_cast<std::size_t>(std::ceil(level * n));
  k = std::clamp<std::size_t>(k, 1, n);
  return values[k - 1];
}

UncertaintyBand uncertainty_band(double q, double fallback_lo, double fallback_hi) {
  if (q < 0.0) throw std::invalid_argument("quantile threshold must be >= 0");
  const double ln2 = 0.6931471805599453;
  if (q > ln2) return {fallback_lo, fallback_hi};
  const double hi = std::exp(-q);
  return {1.0 - hi, hi};
}

namespace {

std::pair<double, double> residual_weights(const Dataset& buffer, const PrismConfig& cfg) {
  if (cfg.train.weighting == ClassWeighting::InverseFrequency) return class_weights(buffer);
  return {1.0, 1.0};
}

void validation_accuracy(const MonitorParams& theta, const Dataset& val, double alpha,
                         IterationMetrics& m) {
  std::size_t n1 = 0, n0 = 0, hit1 = 0, hit0 = 0;
  for (const auto& s : val.samples()) {
    const bool stop = decide(forward(theta, s.state), alpha) == Decision::Stoppable;
    if (s.label == 1) {
      ++n1;
      if (stop) ++hit1;
    } else {
      ++n0;
      if (!stop) ++hit0;
    }
  }
  m.safe_acc = n1 ? static_cast<double>(hit1) / n1 : 0.0;
  m.unsafe_acc = n0 ? static_cast<double>(hit0) / n0 : 0.0;
}

void check_val_disjoint(const Dataset& buffer, const Dataset& val) {
  std::set<std::string> val_ids;
  for (const auto& s : val.samples()) val_ids.insert(s.traj_id);
  for (const auto& s : buffer.samples()) {
    if (val_ids.count(s.traj_id))
      throw std::logic_error("validation trajectory leaked into training buffer: " +
                             s.traj_id);
  }
}

MonitorParams fresh_monitor(const EnvSpec& spec, const PrismConfig& cfg, std::uint64_t seed,
                            int iteration) {
  Rng root(seed);
  return init_monitor(cfg.hidden, spec.box_lo, spec.box_hi, root.split("init", iteration));
}

MonitorParams retrain(const MonitorParams& prev, const EnvSpec& spec, const Dataset& buffer,
                      const PrismConfig& cfg, std::uint64_t seed, int iteration) {
  Rng root(seed);
  MonitorParams start =
      cfg.warm_start && iteration > 0 ? prev : fresh_monitor(spec, cfg, seed, iteration);
  TrainHyper h = cfg.train;
  h.seed = root.split("train", iteration).seed();
  return train(start, buffer, h).params;
}

}  // namespace

Trajectory collect_trajectory(const EnvSpec& spec, const EnvParams& base_params,
                              const PrismConfig& cfg, std::uint64_t seed, int index,
                              const std::string& id_prefix) {
  Rng root(seed);
  Rng traj_rng = root.split(id_prefix + "-traj", index);
  Rng dr_rng = traj_rng.split("dr");
  const EnvParams params = randomize_env(base_params, cfg.dr, dr_rng);
  Rng init_rng = traj_rng.split("x0");
  const State x0 = sample_initial_state(spec, init_rng);
  Trajectory traj = rollout_nominal(x0, spec, params, cfg.horizon, traj_rng.split("dyn"));
  traj.id = id_prefix + "-" + std::to_string(index);
  return traj;
}

int label_sample(const Trajectory& traj, int t, const EnvSpec& spec, const PrismConfig& cfg,
                 std::uint64_t seed, int traj_index, const std::string& id_prefix) {
  Rng root(seed);
  Rng traj_rng = root.split(id_prefix + "-traj", traj_index);
  return label_trigger(traj.states[t], spec, traj.params, cfg.t_max,
                       traj_rng.split("label", t));
}

PrismState init_prism(const EnvSpec& spec, const EnvParams& base_params,
                      const PrismConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  PrismState s;

  // validation set: fully labeled at the fine stride, frozen
  StrideConfig val_strides = cfg.strides;
  auto always = [](const State&) { return true; };
  for (int i = 0; i < cfg.n_val; ++i) {
    Trajectory traj = collect_trajectory(spec, base_params, cfg, seed, i, "val");
    for (int t : stride_sample(traj, val_strides, always)) {
      TriggerSample ts;
      ts.state = traj.states[t];
      ts.label = label_sample(traj, t, spec, cfg, seed, i, "val");
      ts.traj_id = traj.id;
      ts.time_index = t;
      ts.iteration = -1;
      ts.params = traj.params;
      s.validation.add(std::move(ts));
    }
  }

  // initial buffer: n0 trajectories at the uniform coarse stride
  auto never = [](const State&) { return false; };
  for (int i = 0; i < cfg.n0; ++i) {
    Trajectory traj = collect_trajectory(spec, base_params, cfg, seed, i, "traj");
    for (int t : stride_sample(traj, cfg.strides, never)) {
      TriggerSample ts;
      ts.state = traj.states[t];
      ts.label = label_sample(traj, t, spec, cfg, seed, i, "traj");
      ts.traj_id = traj.id;
      ts.time_index = t;
      ts.iteration = 0;
      ts.params = traj.params;
      s.buffer.add(std::move(ts));
    }
  }
  s.traj_counter = cfg.n0;

  s.theta = retrain(MonitorParams{}, spec, s.buffer, cfg, seed, 0);

  IterationMetrics m;
  m.iter = 0;
  m.total_data = s.buffer.size();
  m.unsafe_ratio = s.buffer.unsafe_ratio();
  m.num_traj = cfg.n0;
  validation_accuracy(s.theta, s.validation, cfg.alpha, m);
  s.history.push_back(m);
  return s;
}

PrismState refine_iteration(PrismState s, const EnvSpec& spec, const EnvParams& base_params,
                            const PrismConfig& cfg, std::uint64_t seed) {
  check_val_disjoint(s.buffer, s.validation);

  const auto w = residual_weights(s.buffer, cfg);
  const double q = quantile(residuals(s.theta, s.validation, w), 1.0 - cfg.delta);
  const UncertaintyBand band =
      uncertainty_band(q, cfg.band_fallback_lo, cfg.band_fallback_hi);
  const bool degenerate = q > 0.6931471805599453;

  const MonitorParams& theta = s.theta;  // the iteration-k monitor
  auto in_band = [&theta, band](const State& x) {
    const double v = forward(theta, x);
    return v >= band.p_lo && v <= band.p_hi;
  };
  auto never = [](const State&) { return false; };

  const int n_adaptive = static_cast<int>(std::llround(cfg.beta * cfg.n_i));
  const int next_iter = s.iteration + 1;

  Dataset fresh;
  std::size_t adaptive_total = 0, adaptive_in = 0, coarse_total = 0, coarse_in = 0;
  for (int j = 0; j < cfg.n_i; ++j) {
    const int idx = s.traj_counter + j;
    Trajectory traj = collect_trajectory(spec, base_params, cfg, seed, idx, "traj");
    const bool adaptive = j < n_adaptive;
    std::vector<int> indices = adaptive ? stride_sample(traj, cfg.strides, in_band)
                                        : stride_sample(traj, cfg.strides, never);
    if (adaptive) {
      for (int t : indices) {
        ++adaptive_total;
        if (in_band(traj.states[t])) ++adaptive_in;
      }
      for (int t : stride_sample(traj, cfg.strides, never)) {
        ++coarse_total;
        if (in_band(traj.states[t])) ++coarse_in;
      }
    }
    for (int t : indices) {
      TriggerSample ts;
      ts.state = traj.states[t];
      ts.label = label_sample(traj, t, spec, cfg, seed, idx, "traj");
      ts.traj_id = traj.id;
      ts.time_index = t;
      ts.iteration = next_iter;
      ts.params = traj.params;
      fresh.add(std::move(ts));
    }
  }
  s.traj_counter += cfg.n_i;

  s.buffer = merge(s.buffer, fresh);
  s.quantile = q;
  s.iteration = next_iter;
  s.theta = retrain(s.theta, spec, s.buffer, cfg, seed, next_iter);

  IterationMetrics m;
  m.iter = next_iter;
  m.total_data = s.buffer.size();
  m.unsafe_ratio = s.buffer.unsafe_ratio();
  m.num_traj = s.traj_counter;
  m.quantile = q;
  m.band_lo = band.p_lo;
  m.band_hi = band.p_hi;
  m.band_degenerate = degenerate;
  m.band_frac_adaptive =
      adaptive_total ? static_cast<double>(adaptive_in) / adaptive_total : 0.0;
  m.band_frac_coarse = coarse_total ? static_cast<double>(coarse_in) / coarse_total : 0.0;
  validation_accuracy(s.theta, s.validation, cfg.alpha, m);
  s.history.push_back(m);
  return s;
}

PrismResult run_prism(const EnvSpec& spec, const EnvParams& base_params,
                      const PrismConfig& cfg, std::uint64_t seed) {
  PrismState s = init_prism(spec, base_params, cfg, seed);
  for (int k = 0; k < cfg.k_iters; ++k) {
    s = refine_iteration(std::move(s), spec, base_params, cfg, seed);
  }
  PrismResult res;
  res.monitor = std::move(s.theta);
  res.history = std::move(s.history);
  res.buffer = std::move(s.buffer);
  res.validation = std::move(s.validation);
  return res;
}

void write_history_csv(const std::vector<IterationMetrics>& history,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "iter,total_data,unsafe_ratio,num_traj,safe_acc,unsafe_acc\n";
  char buf[192];
  for (const auto& m : history) {
    std::snprintf(buf, sizeof(buf), "%d,%zu,%.10g,%d,%.10g,%.10g\n", m.iter, m.total_data,
                  m.unsafe_ratio, m.num_traj, m.safe_acc, m.unsafe_acc);
    out << buf;
  }
}

}  // namespace prism
