#include "prism/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace prism {

namespace {

constexpr double kEps = 1e-7;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp_prob(double v) { return std::clamp(v, kEps, 1.0 - kEps); }

// scratch buffers reused across samples during training
struct Workspace {
  std::vector<std::vector<double>> act;    // act[0] = normalized input
  std::vector<std::vector<double>> delta;  // per-layer backprop error

  void resize(const std::vector<int>& sizes) {
    act.resize(sizes.size());
    delta.resize(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      act[i].resize(sizes[i]);
      delta[i].resize(sizes[i]);
    }
  }
};

void normalize_input(const MonitorParams& p, const State& x, std::vector<double>& out) {
  for (int i = 0; i < p.input_dim(); ++i) {
    const double span = p.norm_hi[i] - p.norm_lo[i];
    out[i] = 2.0 * (x[i] - p.norm_lo[i]) / span - 1.0;
  }
}

// forward pass filling ws.act; returns sigmoid output
double forward_cached(const MonitorParams& p, const State& x, Workspace& ws) {
  normalize_input(p, x, ws.act[0]);
  const std::size_t L = p.num_layers();
  for (std::size_t l = 0; l < L; ++l) {
    const int n_out = p.layer_sizes[l + 1];
    const int n_in = p.layer_sizes[l];
    const double* w = p.weights[l].data();
    const double* in = ws.act[l].data();
    double* out = ws.act[l + 1].data();
    for (int j = 0; j < n_out; ++j) {
      double z = p.biases[l][j];
      const double* row = w + static_cast<std::size_t>(j) * n_in;
      for (int i = 0; i < n_in; ++i) z += row[i] * in[i];
      out[j] = (l + 1 < L) ? std::tanh(z) : sigmoid(z);
    }
  }
  return ws.act[L][0];
}

// accumulates d(sample loss)/d(theta) into g; scale multiplies the
// contribution (1/batch for mean losses)
void accumulate_grad(const MonitorParams& p, const TriggerSample& s, double weight,
                     double scale, Workspace& ws, MonitorGrad& g) {
  const double v = forward_cached(p, s.state, ws);
  const double vc = clamp_prob(v);
  const double y = s.label;
  // d loss / d z_out via the clamped log terms; equals w*(v - y) away from
  // the clamp boundary
  const double dL_dv = weight * (-y / vc + (1.0 - y) / (1.0 - vc));
  const std::size_t L = p.num_layers();
  ws.delta[L][0] = dL_dv * v * (1.0 - v);

  for (std::size_t l = L; l-- > 0;) {
    const int n_out = p.layer_sizes[l + 1];
    const int n_in = p.layer_sizes[l];
    const double* in = ws.act[l].data();
    const double* dout = ws.delta[l + 1].data();
    double* gw = g.weights[l].data();
    double* gb = g.biases[l].data();
    for (int j = 0; j < n_out; ++j) {
      const double d = dout[j] * scale;
      gb[j] += d;
      double* grow = gw + static_cast<std::size_t>(j) * n_in;
      for (int i = 0; i < n_in; ++i) grow[i] += d * in[i];
    }
    if (l > 0) {
      const double* w = p.weights[l].data();
      double* din = ws.delta[l].data();
      for (int i = 0; i < n_in; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n_out; ++j)
          acc += w[static_cast<std::size_t>(j) * n_in + i] * dout[j];
        const double a = ws.act[l][i];
        din[i] = acc * (1.0 - a * a);  // tanh'
      }
    }
  }
}

MonitorGrad zero_grad(const MonitorParams& p) {
  MonitorGrad g;
  g.weights.resize(p.num_layers());
  g.biases.resize(p.num_layers());
  for (std::size_t l = 0; l < p.num_layers(); ++l) {
    g.weights[l].assign(p.weights[l].size(), 0.0);
    g.biases[l].assign(p.biases[l].size(), 0.0);
  }
  return g;
}

}  // namespace

MonitorParams init_monitor(const std::vector<int>& hidden, const std::vector<double>& norm_lo,
                           const std::vector<double>& norm_hi, Rng rng) {
  if (norm_lo.size() != norm_hi.size() || norm_lo.empty())
    throw std::invalid_argument("bad normalization bounds");
  MonitorParams p;
  p.norm_lo = norm_lo;
  p.norm_hi = norm_hi;
  p.layer_sizes.push_back(static_cast<int>(norm_lo.size()));
  for (int h : hidden) p.layer_sizes.push_back(h);
  p.layer_sizes.push_back(1);
  for (std::size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
    const int n_in = p.layer_sizes[l];
    const int n_out = p.layer_sizes[l + 1];
    const double s = std::sqrt(6.0 / (n_in + n_out));
    std::vector<double> w(static_cast<std::size_t>(n_in) * n_out);
    for (auto& v : w) v = rng.uniform(-s, s);
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(n_out, 0.0);
  }
  return p;
}

double forward(const MonitorParams& params, const State& x) {
  if (static_cast<int>(x.size()) != params.input_dim())
    throw std::invalid_argument("monitor input dimension mismatch");
  Workspace ws;
  ws.resize(params.layer_sizes);
  return forward_cached(params, x, ws);
}

double sample_loss(double v_hat, int label, double weight) {
  const double v = clamp_prob(v_hat);
  return weight * (-label * std::log(v) - (1 - label) * std::log(1.0 - v));
}

double loss(const MonitorParams& params, const std::vector<TriggerSample>& batch,
            std::pair<double, double> w) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  Workspace ws;
  ws.resize(params.layer_sizes);
  double total = 0.0;
  for (const auto& s : batch) {
    const double v = forward_cached(params, s.state, ws);
    total += sample_loss(v, s.label, s.label == 1 ? w.second : w.first);
  }
  return total / batch.size();
}

MonitorGrad grad(const MonitorParams& params, const std::vector<TriggerSample>& batch,
                 std::pair<double, double> w) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  Workspace ws;
  ws.resize(params.layer_sizes);
  MonitorGrad g = zero_grad(params);
  const double scale = 1.0 / batch.size();
  for (const auto& s : batch)
    accumulate_grad(params, s, s.label == 1 ? w.second : w.first, scale, ws, g);
  return g;
}

TrainResult train(const MonitorParams& init, const Dataset& d, const TrainHyper& h) {
  if (d.empty()) throw std::invalid_argument("empty dataset");
  std::pair<double, double> w{1.0, 1.0};
  if (h.weighting == ClassWeighting::InverseFrequency) w = class_weights(d);

  TrainResult res;
  res.params = init;
  MonitorParams& p = res.params;
  MonitorGrad vel = zero_grad(p);
  MonitorGrad g = zero_grad(p);
  Workspace ws;
  ws.resize(p.layer_sizes);

  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng root(h.seed);

  for (int epoch = 0; epoch < h.epochs; ++epoch) {
    // Fisher-Yates with the per-epoch stream
    Rng shuffle_rng = root.split("shuffle", epoch);
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.index(i + 1)]);

    double epoch_loss = 0.0;
    std::size_t pos = 0;
    while (pos < n) {
      const std::size_t end = std::min(pos + static_cast<std::size_t>(h.batch_size), n);
      const double scale = 1.0 / static_cast<double>(end - pos);
      for (std::size_t l = 0; l < p.num_layers(); ++l) {
        std::fill(g.weights[l].begin(), g.weights[l].end(), 0.0);
        std::fill(g.biases[l].begin(), g.biases[l].end(), 0.0);
      }
      for (std::size_t k = pos; k < end; ++k) {
        const auto& s = d.samples()[order[k]];
        const double weight = s.label == 1 ? w.second : w.first;
        const double v = forward_cached(p, s.state, ws);
        epoch_loss += sample_loss(v, s.label, weight);
        accumulate_grad(p, s, weight, scale, ws, g);
      }
      for (std::size_t l = 0; l < p.num_layers(); ++l) {
        for (std::size_t i = 0; i < p.weights[l].size(); ++i) {
          vel.weights[l][i] = h.momentum * vel.weights[l][i] - h.learning_rate * g.weights[l][i];
          p.weights[l][i] += vel.weights[l][i];
        }
        for (std::size_t i = 0; i < p.biases[l].size(); ++i) {
          vel.biases[l][i] = h.momentum * vel.biases[l][i] - h.learning_rate * g.biases[l][i];
          p.biases[l][i] += vel.biases[l][i];
        }
      }
      pos = end;
    }
    res.epoch_loss.push_back(epoch_loss / n);
  }
  return res;
}

Decision decide(double v_hat, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0,1]");
  return v_hat >= alpha ? Decision::Stoppable : Decision::Unstoppable;
}

void save_monitor(const MonitorParams& params, const std::string& path,
                  const std::string& metadata_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const char magic[8] = {'P', 'R', 'I', 'S', 'M', 'M', 'O', 'N'};
  out.write(magic, 8);
  const std::uint32_t version = 1;
  out.write(reinterpret_cast<const char*>(&version), 4);
  const std::uint32_t n = static_cast<std::uint32_t>(params.layer_sizes.size());
  out.write(reinterpret_cast<const char*>(&n), 4);
  for (int s : params.layer_sizes) {
    const std::uint32_t v = static_cast<std::uint32_t>(s);
    out.write(reinterpret_cast<const char*>(&v), 4);
  }
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    out.write(reinterpret_cast<const char*>(params.weights[l].data()),
              static_cast<std::streamsize>(params.weights[l].size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(params.biases[l].data()),
              static_cast<std::streamsize>(params.biases[l].size() * sizeof(double)));
  }

  nlohmann::json side{{"norm_lo", params.norm_lo},
                      {"norm_hi", params.norm_hi},
                      {"metadata", nlohmann::json::parse(metadata_json)}};
  std::ofstream js(path + ".json");
  js << side.dump(2) << "\n";
}

MonitorParams load_monitor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, "PRISMMON", 8) != 0)
    throw std::runtime_error("bad monitor file magic: " + path);
  std::uint32_t version = 0, n = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != 1) throw std::runtime_error("unsupported monitor file version");
  in.read(reinterpret_cast<char*>(&n), 4);
  MonitorParams p;
  p.layer_sizes.resize(n);
  for (auto& s : p.layer_sizes) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    s = static_cast<int>(v);
  }
  for (std::size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
    std::vector<double> w(static_cast<std::size_t>(p.layer_sizes[l]) * p.layer_sizes[l + 1]);
    in.read(reinterpret_cast<char*>(w.data()),
            static_cast<std::streamsize>(w.size() * sizeof(double)));
    p.weights.push_back(std::move(w));
    std::vector<double> b(p.layer_sizes[l + 1]);
    in.read(reinterpret_cast<char*>(b.data()),
            static_cast<std::streamsize>(b.size() * sizeof(double)));
    p.biases.push_back(std::move(b));
  }
  if (!in) throw std::runtime_error("truncated monitor file: " + path);

  std::ifstream js(path + ".json");
  if (!js) throw std::runtime_error("missing monitor sidecar: " + path + ".json");
  nlohmann::json side;
  js >> side;
  p.norm_lo = side.at("norm_lo").get<std::vector<double>>();
  p.norm_hi = side.at("norm_hi").get<std::vector<double>>();
  return p;
}

}  // namespace prism
