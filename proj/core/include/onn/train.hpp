#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "onn/dataset.hpp"
#include "onn/network.hpp"

namespace onn {

/// Optimizer and loop settings. The optical geometry lives in
/// OpticalConfig; this struct owns everything else a run needs.
struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t train_count = 10000;
  std::size_t test_count = 1000;
  std::size_t batch_size = 32;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 1;
  bool nonlinear = false;
  SaturationParams sat;
  LossKind loss = LossKind::kNormalizedIntensity;
  bool bilinear = false;        ///< bilinear instead of nearest-neighbor upscale
  bool stratified_test = false; ///< equal per-digit test counts instead of file order
  std::size_t threads = 1;      ///< worker threads per batch
  bool timing = true;           ///< record wall_seconds; off gives bit-stable history

  /// Throws ConfigError on nonpositive counts or betas outside (0, 1).
  void validate() const;
};

/// One history row.
struct EpochRecord {
  std::size_t epoch = 0;  ///< 1-based
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  double wall_seconds = 0.0;
};

struct EvalResult {
  double accuracy = 0.0;
  std::array<std::array<std::size_t, 10>, 10> confusion{};  ///< [true][predicted]
};

/// Standard Adam update with bias correction, applied in place to the
/// mask. Throws on non-finite gradient entries, naming the first one.
void adam_step(ModelState& state, const std::vector<double>& gradient,
               const TrainConfig& config);

/// Test-set indices for evaluation: the first test_count samples in file
/// order, or with `stratified_test` the earliest samples of each digit in
/// equal shares (remainder spread over the lowest digits).
std::vector<std::size_t> test_slice(const RawDataset& test_data,
                                    const TrainConfig& config);

/// Accuracy and confusion matrix of `state` over the given sample indices.
EvalResult evaluate(const ModelState& state, const RawDataset& data,
                    const std::vector<std::size_t>& indices,
                    const DetectorLayout& layout, const TrainConfig& config);

/// Invoked after each epoch's evaluation; `is_best` marks a new best test
/// accuracy (ties do not count).
using EpochCallback =
    std::function<void(const ModelState&, const EpochRecord&, bool is_best)>;

/// Full training loop: seeds the mask with uniform phases in [-pi, pi),
/// then runs `epochs` passes of shuffled mini-batches with Adam updates.
/// Per-sample gradients are reduced in ascending sample order so the run
/// is bitwise deterministic for a fixed seed at any thread count.
std::vector<EpochRecord> train(const RawDataset& train_data,
                               const RawDataset& test_data, ModelState& state,
                               const DetectorLayout& layout,
                               const TrainConfig& config,
                               const EpochCallback& callback = {});

/// Writes history rows as CSV: epoch,train_loss,test_accuracy,wall_seconds.
void write_history(const std::string& path,
                   const std::vector<EpochRecord>& history);

}  // namespace onn
