#pragma once

// Independent-trajectory ensembles. Path i always uses RandomStream(seed, i)
// and results are stored by stream index, so the aggregate does not depend on
// worker count or scheduling. `Execution::Serial` is the reference loop the
// OpenMP kernel is tested against.

#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <omp.h>

#include "vaxsde/integrator.hpp"

namespace vaxsde {

enum class Execution { Serial, Parallel };

class PathError : public std::runtime_error {
 public:
  PathError(std::uint64_t stream_id, const std::string& what)
      : std::runtime_error("stream " + std::to_string(stream_id) + ": " + what),
        stream_id_(stream_id) {}
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t stream_id_;
};

/// Caps the OpenMP worker count (0 leaves the runtime default).
inline void set_worker_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

inline int worker_count() { return omp_get_max_threads(); }

/// Runs `task(i)` for i in [0, n) and stores results by index. Exceptions are
/// rethrown as PathError for the lowest failing index.
template <class Task>
auto indexed_map(std::size_t n, Execution exec, Task&& task)
    -> std::vector<std::invoke_result_t<Task&, std::size_t>> {
  using R = std::invoke_result_t<Task&, std::size_t>;
  std::vector<std::optional<R>> slots(n);
  std::vector<std::string> errors(n);
  std::vector<char> failed(n, 0);

  auto body = [&](std::size_t i) {
    try {
      slots[i].emplace(task(i));
    } catch (const std::exception& e) {
      failed[i] = 1;
      errors[i] = e.what();
    }
  };

  if (exec == Execution::Parallel) {
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }

  std::vector<R> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (failed[i]) throw PathError(i, errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

/// Simulates `n_paths` trajectories and applies `reducer(path, stream_id)`
/// to each; returns per-path results in stream order.
template <class Reducer>
auto ensemble_map(const State& initial, const ModelParams& params, const IntegratorConfig& config,
                  std::size_t n_paths, std::uint64_t master_seed, Reducer&& reducer,
                  Execution exec = Execution::Parallel, const ControlSchedule* control = nullptr,
                  std::uint64_t first_stream = 0) {
  if (n_paths < 1) throw DomainError("ensemble needs n_paths >= 1");
  return indexed_map(n_paths, exec, [&](std::size_t i) {
    const std::uint64_t id = first_stream + i;
    const Path path = simulate(initial, params, control, config, RandomStream(master_seed, id));
    return reducer(path, id);
  });
}

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Sample mean and its standard error, accumulated in index order.
inline MeanEstimate mean_estimate(const std::vector<double>& values) {
  MeanEstimate out;
  out.n = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(out.n);
  if (out.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(ss / static_cast<double>(out.n - 1) / static_cast<double>(out.n));
  }
  return out;
}

}  // namespace vaxsde
