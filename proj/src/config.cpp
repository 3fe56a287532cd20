#include "prism/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace prism {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
  }
}

long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': not a boolean: '" + v + "'");
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& key, const std::string& v, F item) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(item(key, tok));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt_list_d(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

std::string fmt_list_i(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "env") {
    if (value != "braking" && value != "cartpole")
      throw ConfigError("config key 'env': unknown environment '" + value + "'");
    c.env = value;
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(to_int(key, value));
  } else if (key == "out") {
    c.out_dir = value;
  } else if (key == "env.damping") {
    c.params.damping_scale = to_double(key, value);
  } else if (key == "env.gain") {
    c.params.gain_scale = to_double(key, value);
  } else if (key == "env.friction") {
    c.params.friction_scale = to_double(key, value);
  } else if (key == "env.sigma") {
    c.params.disturbance_sigma = to_double(key, value);
  } else if (key == "env.dt") {
    c.params.dt = to_double(key, value);
  } else if (key == "prism.alpha") {
    c.prism.alpha = to_double(key, value);
  } else if (key == "prism.beta") {
    c.prism.beta = to_double(key, value);
  } else if (key == "prism.delta") {
    c.prism.delta = to_double(key, value);
  } else if (key == "prism.n0") {
    c.prism.n0 = static_cast<int>(to_int(key, value));
  } else if (key == "prism.n_i") {
    c.prism.n_i = static_cast<int>(to_int(key, value));
  } else if (key == "prism.k_iters") {
    c.prism.k_iters = static_cast<int>(to_int(key, value));
  } else if (key == "prism.n_val") {
    c.prism.n_val = static_cast<int>(to_int(key, value));
  } else if (key == "prism.t_max") {
    c.prism.t_max = static_cast<int>(to_int(key, value));
  } else if (key == "prism.horizon") {
    c.prism.horizon = static_cast<int>(to_int(key, value));
  } else if (key == "prism.stride_coarse") {
    c.prism.strides.coarse = static_cast<int>(to_int(key, value));
  } else if (key == "prism.stride_fine") {
    c.prism.strides.fine = static_cast<int>(to_int(key, value));
  } else if (key == "prism.hidden") {
    c.prism.hidden = to_list<int>(key, value, [](const std::string& k, const std::string& t) {
      return static_cast<int>(to_int(k, t));
    });
  } else if (key == "prism.warm_start") {
    c.prism.warm_start = to_bool(key, value);
  } else if (key == "train.learning_rate") {
    c.prism.train.learning_rate = to_double(key, value);
  } else if (key == "train.batch_size") {
    c.prism.train.batch_size = static_cast<int>(to_int(key, value));
  } else if (key == "train.epochs") {
    c.prism.train.epochs = static_cast<int>(to_int(key, value));
  } else if (key == "train.momentum") {
    c.prism.train.momentum = to_double(key, value);
  } else if (key == "train.weighting") {
    if (value == "inverse_frequency")
      c.prism.train.weighting = ClassWeighting::InverseFrequency;
    else if (value == "none")
      c.prism.train.weighting = ClassWeighting::None;
    else
      throw ConfigError("config key 'train.weighting': unknown value '" + value + "'");
  } else if (key == "dr.axis") {
    try {
      c.prism.dr.axis = parse_dr_axis(value);
    } catch (const std::exception&) {
      throw ConfigError("config key 'dr.axis': unknown axis '" + value + "'");
    }
  } else if (key == "dr.lo") {
    c.prism.dr.lo = to_double(key, value);
  } else if (key == "dr.hi") {
    c.prism.dr.hi = to_double(key, value);
  } else if (key == "grid.res") {
    c.grid_res = static_cast<int>(to_int(key, value));
  } else if (key == "oracle.m") {
    c.oracle_m = static_cast<int>(to_int(key, value));
  } else if (key == "eval.alphas") {
    c.alphas = to_list<double>(key, value, to_double);
  } else if (key == "eval.strides") {
    c.ablation_strides =
        to_list<int>(key, value, [](const std::string& k, const std::string& t) {
          return static_cast<int>(to_int(k, t));
        });
  } else if (key == "eval.ablation_traj") {
    c.ablation_traj = static_cast<int>(to_int(key, value));
  } else if (key == "eval.trace_m") {
    c.trace_m = static_cast<int>(to_int(key, value));
  } else if (key == "baseline.num_traj") {
    c.baseline_traj = static_cast<int>(to_int(key, value));
  } else if (key == "baseline.stride") {
    c.baseline_stride = static_cast<int>(to_int(key, value));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  if (grid_res < 2) throw ConfigError("grid.res must be >= 2");
  if (oracle_m < 1) throw ConfigError("oracle.m must be >= 1");
  if (ablation_traj < 1) throw ConfigError("eval.ablation_traj must be >= 1");
  if (baseline_traj < 0) throw ConfigError("baseline.num_traj must be >= 0");
  if (baseline_stride < 1) throw ConfigError("baseline.stride must be >= 1");
  if (trace_m < 1) throw ConfigError("eval.trace_m must be >= 1");
  if (params.dt <= 0.0) throw ConfigError("env.dt must be > 0");
  if (params.disturbance_sigma < 0.0) throw ConfigError("env.sigma must be >= 0");
  for (double a : alphas)
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("eval.alphas entries must be in (0,1]");
  for (int s : ablation_strides)
    if (s < 1) throw ConfigError("eval.strides entries must be >= 1");
  try {
    prism.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string resolved_text(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "baseline.num_traj = " << c.baseline_traj << "\n";
  out << "baseline.stride = " << c.baseline_stride << "\n";
  out << "dr.axis = " << dr_axis_name(c.prism.dr.axis) << "\n";
  out << "dr.hi = " << fmt(c.prism.dr.hi) << "\n";
  out << "dr.lo = " << fmt(c.prism.dr.lo) << "\n";
  out << "env = " << c.env << "\n";
  out << "env.damping = " << fmt(c.params.damping_scale) << "\n";
  out << "env.dt = " << fmt(c.params.dt) << "\n";
  out << "env.friction = " << fmt(c.params.friction_scale) << "\n";
  out << "env.gain = " << fmt(c.params.gain_scale) << "\n";
  out << "env.sigma = " << fmt(c.params.disturbance_sigma) << "\n";
  out << "eval.ablation_traj = " << c.ablation_traj << "\n";
  out << "eval.alphas = " << fmt_list_d(c.alphas) << "\n";
  out << "eval.strides = " << fmt_list_i(c.ablation_strides) << "\n";
  out << "eval.trace_m = " << c.trace_m << "\n";
  out << "grid.res = " << c.grid_res << "\n";
  out << "oracle.m = " << c.oracle_m << "\n";
  out << "out = " << c.out_dir << "\n";
  out << "prism.alpha = " << fmt(c.prism.alpha) << "\n";
  out << "prism.beta = " << fmt(c.prism.beta) << "\n";
  out << "prism.delta = " << fmt(c.prism.delta) << "\n";
  out << "prism.hidden = " << fmt_list_i(c.prism.hidden) << "\n";
  out << "prism.horizon = " << c.prism.horizon << "\n";
  out << "prism.k_iters = " << c.prism.k_iters << "\n";
  out << "prism.n0 = " << c.prism.n0 << "\n";
  out << "prism.n_i = " << c.prism.n_i << "\n";
  out << "prism.n_val = " << c.prism.n_val << "\n";
  out << "prism.stride_coarse = " << c.prism.strides.coarse << "\n";
  out << "prism.stride_fine = " << c.prism.strides.fine << "\n";
  out << "prism.t_max = " << c.prism.t_max << "\n";
  out << "prism.warm_start = " << (c.prism.warm_start ? "true" : "false") << "\n";
  out << "seed = " << c.seed << "\n";
  out << "train.batch_size = " << c.prism.train.batch_size << "\n";
  out << "train.epochs = " << c.prism.train.epochs << "\n";
  out << "train.learning_rate = " << fmt(c.prism.train.learning_rate) << "\n";
  out << "train.momentum = " << fmt(c.prism.train.momentum) << "\n";
  out << "train.weighting = "
      << (c.prism.train.weighting == ClassWeighting::InverseFrequency ? "inverse_frequency"
                                                                      : "none")
      << "\n";
  return out.str();
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
  const std::string text = resolved_text(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace prism
