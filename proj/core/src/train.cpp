#include "onn/train.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "onn/errors.hpp"
#include "onn/rng.hpp"

namespace onn {

namespace {

/// Runs work(i) for i in [0, count) on up to `threads` workers. The first
/// exception wins and is rethrown on the calling thread.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& work) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto runner = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        work(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(std::min(threads, count));
  for (std::size_t t = 0; t < std::min(threads, count); ++t)
    pool.emplace_back(runner);
  for (auto& worker : pool) worker.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs == 0 || train_count == 0 || test_count == 0 || batch_size == 0)
    throw ConfigError("epochs, train_count, test_count, and batch_size must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning_rate must be positive and finite");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
    throw ConfigError("adam betas must lie in (0, 1)");
  if (!(adam_epsilon > 0.0))
    throw ConfigError("adam_epsilon must be positive");
  if (threads == 0) throw ConfigError("threads must be positive");
  if (nonlinear) onn::validate(sat);
}

void adam_step(ModelState& state, const std::vector<double>& gradient,
               const TrainConfig& config) {
  const std::size_t n = state.mask.phase.size();
  if (gradient.size() != n || state.adam_m.size() != n || state.adam_v.size() != n)
    throw ShapeError("adam_step: gradient/moment sizes do not match the mask");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(gradient[i]))
      throw Error("adam_step: non-finite gradient entry " + std::to_string(gradient[i]) +
                  " at index " + std::to_string(i));

  const std::uint64_t t = state.step + 1;
  const double bias_m = 1.0 - std::pow(config.beta1, double(t));
  const double bias_v = 1.0 - std::pow(config.beta2, double(t));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = gradient[i];
    state.adam_m[i] = config.beta1 * state.adam_m[i] + (1.0 - config.beta1) * g;
    state.adam_v[i] = config.beta2 * state.adam_v[i] + (1.0 - config.beta2) * g * g;
    const double m_hat = state.adam_m[i] / bias_m;
    const double v_hat = state.adam_v[i] / bias_v;
    state.mask.phase[i] -= config.learning_rate * m_hat /
                           (std::sqrt(v_hat) + config.adam_epsilon);
  }
  state.step = t;
}

std::vector<std::size_t> test_slice(const RawDataset& test_data,
                                    const TrainConfig& config) {
  if (config.test_count > test_data.count)
    throw ShapeError("test_count " + std::to_string(config.test_count) +
                     " exceeds test set size " + std::to_string(test_data.count));
  std::vector<std::size_t> indices;
  indices.reserve(config.test_count);
  if (!config.stratified_test) {
    for (std::size_t i = 0; i < config.test_count; ++i) indices.push_back(i);
    return indices;
  }

  std::array<std::size_t, 10> quota{};
  for (int label = 0; label < 10; ++label)
    quota[label] = config.test_count / 10 +
                   (std::size_t(label) < config.test_count % 10 ? 1 : 0);
  for (std::size_t i = 0; i < test_data.count && indices.size() < config.test_count; ++i) {
    std::size_t& remaining = quota[test_data.labels[i]];
    if (remaining > 0) {
      --remaining;
      indices.push_back(i);
    }
  }
  if (indices.size() < config.test_count)
    throw ShapeError("test set lacks enough samples for a stratified slice of " +
                     std::to_string(config.test_count));
  return indices;
}

EvalResult evaluate(const ModelState& state, const RawDataset& data,
                    const std::vector<std::size_t>& indices,
                    const DetectorLayout& layout, const TrainConfig& config) {
  EvalResult result;
  std::vector<int> predicted(indices.size());
  parallel_for(indices.size(), config.threads, [&](std::size_t i) {
    const RealGrid image = preprocess(data, indices[i], state.config, config.bilinear);
    predicted[i] = predict(forward(image, state, layout, config.nonlinear));
  });
  std::size_t hits = 0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int truth = data.labels[indices[i]];
    ++result.confusion[truth][predicted[i]];
    if (predicted[i] == truth) ++hits;
  }
  result.accuracy = indices.empty() ? 0.0 : double(hits) / double(indices.size());
  return result;
}

std::vector<EpochRecord> train(const RawDataset& train_data,
                               const RawDataset& test_data, ModelState& state,
                               const DetectorLayout& layout,
                               const TrainConfig& config,
                               const EpochCallback& callback) {
  config.validate();
  validate(state.config);
  if (config.train_count > train_data.count)
    throw ShapeError("train_count " + std::to_string(config.train_count) +
                     " exceeds training set size " + std::to_string(train_data.count));

  std::mt19937_64 rng(config.seed);
  for (double& phi : state.mask.phase)
    phi = (2.0 * rand_unit(rng) - 1.0) * M_PI;
  std::fill(state.adam_m.begin(), state.adam_m.end(), 0.0);
  std::fill(state.adam_v.begin(), state.adam_v.end(), 0.0);
  state.step = 0;

  const std::vector<std::size_t> eval_indices = test_slice(test_data, config);
  std::vector<std::size_t> order(config.train_count);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const std::size_t mask_size = state.mask.phase.size();
  std::vector<std::vector<double>> grad_slots(config.batch_size);
  std::vector<double> loss_slots(config.batch_size);
  std::vector<double> batch_grad(mask_size);

  std::vector<EpochRecord> history;
  history.reserve(config.epochs);
  double best_accuracy = -1.0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    shuffle_indices(order, rng);

    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t batch_n = std::min(config.batch_size, order.size() - begin);
      parallel_for(batch_n, config.threads, [&](std::size_t k) {
        const std::size_t sample = order[begin + k];
        const RealGrid image =
            preprocess(train_data, sample, state.config, config.bilinear);
        Tape tape;
        forward(image, state, layout, config.nonlinear, &tape);
        const double sample_loss =
            loss(tape.scores, train_data.labels[sample], config.loss);
        if (!std::isfinite(sample_loss))
          throw Error("non-finite loss at training sample " + std::to_string(sample));
        loss_slots[k] = sample_loss;
        grad_slots[k] = backward(tape, train_data.labels[sample], config.loss);
      });

      // Fixed ascending reduction keeps runs bitwise reproducible.
      std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
      for (std::size_t k = 0; k < batch_n; ++k) {
        epoch_loss += loss_slots[k];
        for (std::size_t i = 0; i < mask_size; ++i) batch_grad[i] += grad_slots[k][i];
      }
      const double inv_n = 1.0 / double(batch_n);
      for (double& g : batch_grad) g *= inv_n;
      adam_step(state, batch_grad, config);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_loss / double(config.train_count);
    record.test_accuracy =
        evaluate(state, test_data, eval_indices, layout, config).accuracy;
    if (config.timing) {
      const auto elapsed = std::chrono::steady_clock::now() - started;
      record.wall_seconds = std::chrono::duration<double>(elapsed).count();
    }
    const bool is_best = record.test_accuracy > best_accuracy;
    if (is_best) best_accuracy = record.test_accuracy;
    history.push_back(record);
    if (callback) callback(state, record, is_best);
  }
  return history;
}

void write_history(const std::string& path,
                   const std::vector<EpochRecord>& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write history file " + path);
  char line[160];
  for (const EpochRecord& row : history) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", row.epoch,
                  row.train_loss, row.test_accuracy, row.wall_seconds);
    out << line;
  }
  if (!out.flush()) throw Error("failed writing history file " + path);
}

}  // namespace onn
