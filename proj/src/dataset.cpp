#include "prism/dataset.hpp"

#include <fstream>

#include <json.hpp>

namespace prism {

void Dataset::add(TriggerSample s) {
  auto key = std::make_pair(s.traj_id, s.time_index);
  if (!keys_.insert(key).second) {
    throw std::invalid_argument("duplicate sample key: " + s.traj_id + "@" +
                                std::to_string(s.time_index));
  }
  if (s.label == 1)
    ++n_safe_;
  else
    ++n_unsafe_;
  samples_.push_back(std::move(s));
}

std::vector<int> stride_sample(const Trajectory& traj, const StrideConfig& strides,
                               const std::function<bool(const State&)>& in_region) {
  if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
  if (strides.fine < 1 || strides.fine >= strides.coarse)
    throw std::invalid_argument("strides must satisfy 1 <= fine < coarse");
  const int len = static_cast<int>(traj.sampling_length());
  std::vector<int> out{0};
  int t = 0;
  while (true) {
    const int cand_fine = t + strides.fine;
    if (cand_fine < len && in_region(traj.states[cand_fine])) {
      t = cand_fine;
    } else {
      const int cand_coarse = t + strides.coarse;
      if (cand_coarse >= len) break;
      t = cand_coarse;
    }
    out.push_back(t);
  }
  return out;
}

std::pair<double, double> class_weights(const Dataset& d) {
  if (d.n_safe() == 0 || d.n_unsafe() == 0)
    throw DegenerateDatasetError("dataset contains a single class (n_unsafe=" +
                                 std::to_string(d.n_unsafe()) +
                                 ", n_safe=" + std::to_string(d.n_safe()) +
                                 "); widen sampling");
  const double n = static_cast<double>(d.size());
  return {n / (2.0 * d.n_unsafe()), n / (2.0 * d.n_safe())};
}

Dataset merge(const Dataset& d_prev, const Dataset& d_new) {
  Dataset out;
  for (const auto& s : d_prev.samples()) out.add(s);
  for (const auto& s : d_new.samples()) out.add(s);
  return out;
}

static nlohmann::json params_to_json(const EnvParams& p) {
  return {{"damping", p.damping_scale},
          {"gain", p.gain_scale},
          {"friction", p.friction_scale},
          {"sigma", p.disturbance_sigma},
          {"dt", p.dt}};
}

static EnvParams params_from_json(const nlohmann::json& j) {
  EnvParams p;
  p.damping_scale = j.at("damping").get<double>();
  p.gain_scale = j.at("gain").get<double>();
  p.friction_scale = j.at("friction").get<double>();
  p.disturbance_sigma = j.at("sigma").get<double>();
  p.dt = j.at("dt").get<double>();
  return p;
}

void write_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& s : d.samples()) {
    nlohmann::json j{{"id", s.traj_id},
                     {"t", s.time_index},
                     {"x", s.state},
                     {"y", s.label},
                     {"iter", s.iteration},
                     {"params", params_to_json(s.params)}};
    out << j.dump() << "\n";
  }
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  Dataset d;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    TriggerSample s;
    s.traj_id = j.at("id").get<std::string>();
    s.time_index = j.at("t").get<int>();
    s.state = j.at("x").get<State>();
    s.label = j.at("y").get<int>();
    s.iteration = j.at("iter").get<int>();
    s.params = params_from_json(j.at("params"));
    d.add(std::move(s));
  }
  return d;
}

}  // namespace prism
