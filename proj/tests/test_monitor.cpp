#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "prism/monitor.hpp"

using namespace prism;

namespace {

MonitorParams small_net(const std::vector<int>& hidden, int dim, std::uint64_t seed) {
  std::vector<double> lo(dim, -1.0), hi(dim, 1.0);
  return init_monitor(hidden, lo, hi, Rng(seed));
}

MonitorParams zeroed(MonitorParams p) {
  for (auto& w : p.weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : p.biases) std::fill(b.begin(), b.end(), 0.0);
  return p;
}

TriggerSample make_sample(State x, int label) {
  TriggerSample s;
  s.state = std::move(x);
  s.label = label;
  return s;
}

double fd_loss(MonitorParams p, std::size_t layer, std::size_t idx, bool bias, double h,
               const std::vector<TriggerSample>& batch, std::pair<double, double> w) {
  auto& v = bias ? p.biases[layer][idx] : p.weights[layer][idx];
  v += h;
  return loss(p, batch, w);
}

}  // namespace

TEST_CASE("zeroed network outputs exactly 0.5") {
  auto p = zeroed(small_net({4, 3}, 2, 1));
  CHECK(forward(p, {0.3, -0.7}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(forward(p, {0.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sample loss values") {
  CHECK(sample_loss(0.5, 1, 1.0) == doctest::Approx(std::log(2.0)));
  CHECK(sample_loss(0.5, 0, 1.0) == doctest::Approx(std::log(2.0)));
  CHECK(sample_loss(0.9, 1, 1.0) == doctest::Approx(-std::log(0.9)));
  CHECK(sample_loss(0.9, 0, 2.0) == doctest::Approx(-2.0 * std::log(0.1)));
  // clamp keeps the loss finite at the extremes
  CHECK(std::isfinite(sample_loss(0.0, 1, 1.0)));
  CHECK(std::isfinite(sample_loss(1.0, 0, 1.0)));
}

TEST_CASE("final-bias gradient of the zeroed net is v - y") {
  auto p = zeroed(small_net({4}, 2, 1));
  std::vector<TriggerSample> batch{make_sample({0.2, 0.1}, 1)};
  MonitorGrad g = grad(p, batch, {1.0, 1.0});
  CHECK(g.biases.back()[0] == doctest::Approx(-0.5).epsilon(1e-12));
  batch[0].label = 0;
  g = grad(p, batch, {1.0, 1.0});
  CHECK(g.biases.back()[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
  const double h = 1e-5;
  Rng rng(123);
  for (int net = 0; net < 10; ++net) {
    auto p = small_net({4, 2}, 3, 1000 + net);
    std::vector<TriggerSample> batch;
    for (int b = 0; b < 8; ++b) {
      State x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      batch.push_back(make_sample(std::move(x), static_cast<int>(rng.index(2))));
    }
    std::pair<double, double> w{rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
    MonitorGrad g = grad(p, batch, w);
    for (std::size_t l = 0; l < p.num_layers(); ++l) {
      for (std::size_t i = 0; i < p.weights[l].size(); ++i) {
        const double fd = (fd_loss(p, l, i, false, h, batch, w) -
                           fd_loss(p, l, i, false, -h, batch, w)) /
                          (2 * h);
        CHECK(std::abs(g.weights[l][i] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
      for (std::size_t i = 0; i < p.biases[l].size(); ++i) {
        const double fd = (fd_loss(p, l, i, true, h, batch, w) -
                           fd_loss(p, l, i, true, -h, batch, w)) /
                          (2 * h);
        CHECK(std::abs(g.biases[l][i] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("training separates a linearly separable 2-D problem") {
  Dataset d;
  Rng rng(9);
  for (int i = 0; i < 400; ++i) {
    TriggerSample s;
    s.state = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    s.label = s.state[0] + s.state[1] > 0.0 ? 1 : 0;
    s.traj_id = "sep";
    s.time_index = i;
    d.add(std::move(s));
  }
  TrainHyper h;
  h.epochs = 150;
  h.learning_rate = 5e-3;
  h.seed = 4;
  auto res = train(small_net({16, 16}, 2, 2), d, h);
  int correct = 0;
  for (const auto& s : d.samples()) {
    const bool stop = decide(forward(res.params, s.state), 0.5) == Decision::Stoppable;
    if (stop == (s.label == 1)) ++correct;
  }
  CHECK(static_cast<double>(correct) / d.size() >= 0.99);
  CHECK(res.epoch_loss.back() < res.epoch_loss.front());
}

TEST_CASE("unweighted training on a replicated state recovers the label fraction") {
  Dataset d;
  const State x{0.2, -0.3};
  for (int i = 0; i < 1000; ++i) {
    TriggerSample s;
    s.state = x;
    s.label = i < 300 ? 1 : 0;
    s.traj_id = "bern";
    s.time_index = i;
    d.add(std::move(s));
  }
  TrainHyper h;
  h.epochs = 300;
  h.learning_rate = 5e-3;
  h.seed = 8;
  h.weighting = ClassWeighting::None;
  auto res = train(small_net({8}, 2, 3), d, h);
  CHECK(std::abs(forward(res.params, x) - 0.3) <= 0.02);
}

TEST_CASE("training is bit-identical under a fixed seed") {
  Dataset d;
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    TriggerSample s;
    s.state = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    s.label = static_cast<int>(rng.index(2));
    s.traj_id = "det";
    s.time_index = i;
    d.add(std::move(s));
  }
  TrainHyper h;
  h.epochs = 20;
  h.seed = 17;
  auto a = train(small_net({8, 8}, 2, 6), d, h);
  auto b = train(small_net({8, 8}, 2, 6), d, h);
  for (std::size_t l = 0; l < a.params.num_layers(); ++l) {
    CHECK(a.params.weights[l] == b.params.weights[l]);
    CHECK(a.params.biases[l] == b.params.biases[l]);
  }
}

TEST_CASE("decide thresholds") {
  CHECK(decide(0.5, 0.5) == Decision::Stoppable);
  CHECK(decide(0.4999, 0.5) == Decision::Unstoppable);
  CHECK(decide(1.0, 1.0) == Decision::Stoppable);
  CHECK_THROWS_AS(decide(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(decide(0.5, 1.5), std::invalid_argument);
}

TEST_CASE("monitor serialization round trip") {
  auto p = small_net({5, 3}, 2, 44);
  p.norm_lo = {0.0, -0.5};
  p.norm_hi = {10.0, 3.5};
  auto path = (std::filesystem::temp_directory_path() / "prism_mon_test.bin").string();
  save_monitor(p, path, R"({"env":"braking"})");
  MonitorParams q = load_monitor(path);
  CHECK(q.layer_sizes == p.layer_sizes);
  CHECK(q.norm_lo == p.norm_lo);
  CHECK(q.norm_hi == p.norm_hi);
  for (std::size_t l = 0; l < p.num_layers(); ++l) {
    CHECK(q.weights[l] == p.weights[l]);
    CHECK(q.biases[l] == p.biases[l]);
  }
  CHECK(forward(q, {4.2, 1.1}) == forward(p, {4.2, 1.1}));
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".json");
}
