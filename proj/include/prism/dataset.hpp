#ifndef PRISM_DATASET_HPP
#define PRISM_DATASET_HPP

#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "prism/rollout.hpp"

namespace prism {

struct DegenerateDatasetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TriggerSample {
  State state;
  int label = 0;
  std::string traj_id;
  int time_index = 0;
  int iteration = 0;
  EnvParams params;  // provenance: parameters of the labeling rollout
};

class Dataset {
 public:
  Dataset() = default;

  void add(TriggerSample s);
  const std::vector<TriggerSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  std::size_t n_safe() const { return n_safe_; }      // label 1
  std::size_t n_unsafe() const { return n_unsafe_; }  // label 0
  double unsafe_ratio() const {
    return empty() ? 0.0 : static_cast<double>(n_unsafe_) / size();
  }

 private:
  std::vector<TriggerSample> samples_;
  std::set<std::pair<std::string, int>> keys_;
  std::size_t n_safe_ = 0;
  std::size_t n_unsafe_ = 0;
};

struct StrideConfig {
  int coarse = 20;
  int fine = 2;
};

// Emits index 0, then repeatedly advances by the fine stride when the fine
// candidate lies in the region and by the coarse stride otherwise.
std::vector<int> stride_sample(const Trajectory& traj, const StrideConfig& strides,
                               const std::function<bool(const State&)>& in_region);

// inverse-frequency weights (w0 for label 0, w1 for label 1), normalized so a
// balanced dataset gives (1, 1)
std::pair<double, double> class_weights(const Dataset& d);

Dataset merge(const Dataset& d_prev, const Dataset& d_new);

// line-delimited JSON records
void write_dataset(const Dataset& d, const std::string& path);
Dataset read_dataset(const std::string& path);

}  // namespace prism

#endif
