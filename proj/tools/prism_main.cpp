#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prism/config.hpp"
#include "prism/eval.hpp"
#include "prism/oracle.hpp"
#include "prism/prism.hpp"

namespace fs = std::filesystem;
using namespace prism;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command,
                    const std::vector<std::string>& outputs) {
  nlohmann::json m{{"command", command},
                   {"env", cfg.env},
                   {"seed", cfg.seed},
                   {"fingerprint", config_fingerprint(cfg)},
                   {"outputs", outputs}};
  write_text((fs::path(cfg.out_dir) / "manifest.json").string(), m.dump(2) + "\n");
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

void prepare_out(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  write_text(out_path(cfg, "config.txt"), resolved_text(cfg));
}

long expected_labels(const ExperimentConfig& cfg) {
  const long per_coarse = cfg.prism.horizon / cfg.prism.strides.coarse + 1;
  const long per_fine = cfg.prism.horizon / cfg.prism.strides.fine + 1;
  const long train_traj = cfg.prism.n0 + static_cast<long>(cfg.prism.k_iters) * cfg.prism.n_i;
  return train_traj * per_coarse + cfg.prism.n_val * per_fine;
}

void print_plan(const ExperimentConfig& cfg, const std::string& command) {
  std::printf("plan: %s\n", command.c_str());
  std::printf("  env             %s\n", cfg.env.c_str());
  std::printf("  seed            %llu\n", static_cast<unsigned long long>(cfg.seed));
  std::printf("  fingerprint     %s\n", config_fingerprint(cfg).c_str());
  std::printf("  iterations      %d\n", cfg.prism.k_iters);
  std::printf("  trajectories    %d train + %d validation\n",
              cfg.prism.n0 + cfg.prism.k_iters * cfg.prism.n_i, cfg.prism.n_val);
  std::printf("  label budget    <= %ld rollouts (upper bound at the coarse stride)\n",
              expected_labels(cfg));
  std::printf("  grid            %dx%d cells, M=%d\n", cfg.grid_res, cfg.grid_res,
              cfg.oracle_m);
  std::printf("  out             %s (not written: dry run)\n", cfg.out_dir.c_str());
}

PrismResult run_pipeline(const ExperimentConfig& cfg, const EnvSpec& spec) {
  return run_prism(spec, cfg.params, cfg.prism, cfg.seed);
}

LabeledGrid make_oracle(const ExperimentConfig& cfg, const EnvSpec& spec) {
  GridSpec grid = default_grid(spec, cfg.grid_res, cfg.grid_res);
  return grid_oracle(spec, cfg.params, grid, cfg.oracle_m, cfg.prism.t_max, cfg.prism.alpha,
                     Rng(cfg.seed).split("grid-oracle"));
}

int cmd_run(const ExperimentConfig& cfg, const EnvSpec& spec) {
  prepare_out(cfg);
  PrismResult res = run_pipeline(cfg, spec);
  write_history_csv(res.history, out_path(cfg, "history.csv"));
  nlohmann::json meta{{"env", cfg.env}, {"fingerprint", config_fingerprint(cfg)}};
  save_monitor(res.monitor, out_path(cfg, "monitor.bin"), meta.dump());
  write_dataset(res.buffer, out_path(cfg, "dataset.jsonl"));
  write_dataset(res.validation, out_path(cfg, "validation.jsonl"));
  write_manifest(cfg, "run",
                 {"history.csv", "monitor.bin", "monitor.bin.json", "dataset.jsonl",
                  "validation.jsonl", "config.txt"});
  const auto& last = res.history.back();
  std::printf("run: %zu samples, unsafe ratio %.3f, val safe/unsafe acc %.1f%%/%.1f%%\n",
              last.total_data, last.unsafe_ratio, 100.0 * last.safe_acc,
              100.0 * last.unsafe_acc);
  return kExitOk;
}

int cmd_baseline(const ExperimentConfig& cfg, const EnvSpec& spec) {
  prepare_out(cfg);
  BaselineBudget budget{cfg.baseline_traj, cfg.baseline_stride};
  if (budget.num_traj == 0) {
    PrismResult ref = run_pipeline(cfg, spec);
    budget.num_traj = match_budget_num_traj(spec, cfg.params, cfg.prism, budget.stride,
                                            ref.buffer.size(), cfg.seed);
    std::printf("baseline: matched budget %zu samples -> %d trajectories\n",
                ref.buffer.size(), budget.num_traj);
  }
  LabeledGrid grid = make_oracle(cfg, spec);
  BaselineResult res = baseline_uniform(spec, cfg.params, cfg.prism, budget, cfg.seed, &grid);
  res.row.fingerprint = config_fingerprint(cfg);
  nlohmann::json meta{{"env", cfg.env}, {"fingerprint", config_fingerprint(cfg)}};
  save_monitor(res.monitor, out_path(cfg, "monitor.bin"), meta.dump());
  write_dataset(res.data, out_path(cfg, "dataset.jsonl"));
  write_metrics_csv({res.row}, out_path(cfg, "metrics.csv"));
  write_manifest(cfg, "baseline",
                 {"metrics.csv", "monitor.bin", "monitor.bin.json", "dataset.jsonl",
                  "config.txt"});
  std::printf("baseline: %zu samples, unsafe acc %.2f%%, false safe %.2f%%\n",
              res.row.total_data, res.row.unsafe_acc, res.row.false_safe_rate);
  return kExitOk;
}

int cmd_alpha_sweep(const ExperimentConfig& cfg, const EnvSpec& spec) {
  prepare_out(cfg);
  PrismResult res = run_pipeline(cfg, spec);
  LabeledGrid grid = make_oracle(cfg, spec);
  auto rows = alpha_sweep(res.monitor, grid, cfg.alphas);
  for (auto& r : rows) r.fingerprint = config_fingerprint(cfg);
  write_metrics_csv(rows, out_path(cfg, "alpha_sweep.csv"));
  write_manifest(cfg, "alpha-sweep", {"alpha_sweep.csv", "config.txt"});
  for (const auto& r : rows)
    std::printf("%s: safe %.2f%% unsafe %.2f%%\n", r.experiment.c_str(), r.safe_acc,
                r.unsafe_acc);
  return kExitOk;
}

int cmd_dr_ablation(const ExperimentConfig& cfg, const EnvSpec& spec) {
  prepare_out(cfg);
  PrismResult res = run_pipeline(cfg, spec);
  std::vector<DrConfig> dr_list{{DrAxis::None, 1.0, 1.0},
                                {DrAxis::Damping, 0.7, 1.3},
                                {DrAxis::Gain, 0.6, 1.4},
                                {DrAxis::Friction, 1.3, 2.0}};
  GridSpec grid = default_grid(spec, cfg.grid_res, cfg.grid_res);
  auto rows = dr_ablation(res.monitor, spec, cfg.params, dr_list, grid, cfg.oracle_m,
                          cfg.prism.t_max, cfg.prism.alpha, cfg.seed);
  for (auto& r : rows) r.fingerprint = config_fingerprint(cfg);
  write_metrics_csv(rows, out_path(cfg, "dr_ablation.csv"));
  write_manifest(cfg, "dr-ablation", {"dr_ablation.csv", "config.txt"});
  for (const auto& r : rows)
    std::printf("%s: unsafe acc %.2f%%\n", r.experiment.c_str(), r.unsafe_acc);
  return kExitOk;
}

int cmd_stride_ablation(const ExperimentConfig& cfg, const EnvSpec& spec) {
  prepare_out(cfg);
  LabeledGrid grid = make_oracle(cfg, spec);
  auto rows = stride_ablation(spec, cfg.params, cfg.prism, cfg.ablation_strides,
                              cfg.ablation_traj, grid, cfg.seed);
  for (auto& r : rows) r.fingerprint = config_fingerprint(cfg);
  write_metrics_csv(rows, out_path(cfg, "stride_ablation.csv"));
  write_manifest(cfg, "stride-ablation", {"stride_ablation.csv", "config.txt"});
  for (const auto& r : rows)
    std::printf("%s: %zu samples, unsafe acc %.2f%%\n", r.experiment.c_str(), r.total_data,
                r.unsafe_acc);
  return kExitOk;
}

int cmd_oracle(const ExperimentConfig& cfg, const EnvSpec& spec) {
  prepare_out(cfg);
  LabeledGrid grid = make_oracle(cfg, spec);
  write_grid_csv(grid, out_path(cfg, "oracle_grid.csv"));
  write_manifest(cfg, "oracle", {"oracle_grid.csv", "config.txt"});
  std::size_t stoppable = 0;
  for (int l : grid.labels) stoppable += l;
  std::printf("oracle: %zu / %zu cells stoppable at alpha=%.10g\n", stoppable,
              grid.labels.size(), grid.alpha);
  return kExitOk;
}

int cmd_trace(const ExperimentConfig& cfg, const EnvSpec& spec) {
  prepare_out(cfg);
  PrismResult res = run_pipeline(cfg, spec);
  Trajectory traj = collect_trajectory(spec, cfg.params, cfg.prism, cfg.seed, 0, "trace");
  auto trace = score_trace(res.monitor, traj, spec, cfg.prism.t_max, cfg.trace_m,
                           cfg.prism.alpha, Rng(cfg.seed).split("trace"));
  write_trace_csv(trace, out_path(cfg, "trace.csv"));
  write_manifest(cfg, "trace", {"trace.csv", "config.txt"});
  std::printf("trace: %zu steps\n", trace.size());
  return kExitOk;
}

int cmd_grid(const ExperimentConfig& cfg, const EnvSpec& spec) {
  prepare_out(cfg);
  PrismResult res = run_pipeline(cfg, spec);
  export_value_grid(res.monitor, default_grid(spec, cfg.grid_res, cfg.grid_res),
                    out_path(cfg, "value_grid.csv"));
  write_manifest(cfg, "grid", {"value_grid.csv", "config.txt"});
  std::printf("grid: %dx%d value field exported\n", cfg.grid_res, cfg.grid_res);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prism: learn and evaluate a safe-stoppability monitor"};
  app.require_subcommand(1);

  std::string f_config, f_env, f_seed, f_iters, f_beta, f_delta, f_alpha, f_out;
  bool dry_run = false;
  auto* o_config = app.add_option("--config", f_config, "config file with flat dotted keys");
  auto* o_env = app.add_option("--env", f_env, "environment: braking | cartpole");
  auto* o_seed = app.add_option("--seed", f_seed, "root seed");
  auto* o_iters = app.add_option("--iters", f_iters, "refinement iterations");
  auto* o_beta = app.add_option("--beta", f_beta, "adaptive-sampling mixture weight");
  auto* o_delta = app.add_option("--delta", f_delta, "residual quantile tail");
  auto* o_alpha = app.add_option("--alpha", f_alpha, "decision threshold");
  auto* o_out = app.add_option("--out", f_out, "output directory");
  app.add_flag("--dry-run", dry_run, "print the resolved plan without simulating");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"run", "full refinement pipeline"},
      {"baseline", "uniform-stride training at a matched budget"},
      {"alpha-sweep", "score the trained monitor across decision thresholds"},
      {"dr-ablation", "zero-shot scoring under perturbed plant parameters"},
      {"stride-ablation", "uniform-stride sensitivity study"},
      {"oracle", "export the Monte-Carlo grid oracle"},
      {"trace", "per-step monitor score along a nominal trajectory"},
      {"grid", "export the monitor value field"}};
  for (const auto& [name, desc] : commands) app.add_subcommand(name, desc)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  ExperimentConfig cfg;
  try {
    if (o_config->count()) cfg = parse_config(f_config);
    if (o_env->count()) apply_key(cfg, "env", f_env);
    if (o_seed->count()) apply_key(cfg, "seed", f_seed);
    if (o_iters->count()) apply_key(cfg, "prism.k_iters", f_iters);
    if (o_beta->count()) apply_key(cfg, "prism.beta", f_beta);
    if (o_delta->count()) apply_key(cfg, "prism.delta", f_delta);
    if (o_alpha->count()) apply_key(cfg, "prism.alpha", f_alpha);
    if (o_out->count()) apply_key(cfg, "out", f_out);
    cfg.validate();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }

  if (dry_run) {
    print_plan(cfg, command);
    return kExitOk;
  }

  try {
    const EnvSpec spec = make_spec(cfg.env);
    if (command == "run") return cmd_run(cfg, spec);
    if (command == "baseline") return cmd_baseline(cfg, spec);
    if (command == "alpha-sweep") return cmd_alpha_sweep(cfg, spec);
    if (command == "dr-ablation") return cmd_dr_ablation(cfg, spec);
    if (command == "stride-ablation") return cmd_stride_ablation(cfg, spec);
    if (command == "oracle") return cmd_oracle(cfg, spec);
    if (command == "trace") return cmd_trace(cfg, spec);
    if (command == "grid") return cmd_grid(cfg, spec);
    std::fprintf(stderr, "unknown command: %s\n", command.c_str());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
