#ifndef PRISM_MONITOR_HPP
#define PRISM_MONITOR_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "prism/dataset.hpp"
#include "prism/rng.hpp"

namespace prism {

// Fully connected net: input -> hidden tanh layers -> scalar sigmoid output.
// Input normalization bounds live inside the params so a saved monitor is
// self-contained.
struct MonitorParams {
  std::vector<int> layer_sizes;               // e.g. {2, 64, 64, 1}
  std::vector<std::vector<double>> weights;   // [layer][out*in], row-major
  std::vector<std::vector<double>> biases;    // [layer][out]
  std::vector<double> norm_lo;
  std::vector<double> norm_hi;

  int input_dim() const { return layer_sizes.front(); }
  std::size_t num_layers() const { return weights.size(); }
};

// gradient container, same shapes as the weights/biases of MonitorParams
struct MonitorGrad {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

enum class ClassWeighting { InverseFrequency, None };

struct TrainHyper {
  double learning_rate = 1e-3;
  int batch_size = 128;
  int epochs = 200;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  ClassWeighting weighting = ClassWeighting::InverseFrequency;
};

struct TrainResult {
  MonitorParams params;
  std::vector<double> epoch_loss;  // mean training loss per epoch
};

enum class Decision { Stoppable, Unstoppable };

MonitorParams init_monitor(const std::vector<int>& hidden, const std::vector<double>& norm_lo,
                           const std::vector<double>& norm_hi, Rng rng);

double forward(const MonitorParams& params, const State& x);

double sample_loss(double v_hat, int label, double weight);

double loss(const MonitorParams& params, const std::vector<TriggerSample>& batch,
            std::pair<double, double> w);

MonitorGrad grad(const MonitorParams& params, const std::vector<TriggerSample>& batch,
                 std::pair<double, double> w);

TrainResult train(const MonitorParams& init, const Dataset& d, const TrainHyper& h);

Decision decide(double v_hat, double alpha);

void save_monitor(const MonitorParams& params, const std::string& path,
                  const std::string& metadata_json = "{}");
MonitorParams load_monitor(const std::string& path);

}  // namespace prism

#endif
