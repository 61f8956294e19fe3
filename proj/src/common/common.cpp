#include "jamlab/common/error.hpp"
#include "jamlab/common/numeric.hpp"
#include "jamlab/common/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace jamlab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_params: return "invalid-params";
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::config_parse: return "config-parse";
    case ErrorKind::io: return "io-error";
    case ErrorKind::shape_mismatch: return "shape-mismatch";
    case ErrorKind::no_graph: return "no-graph";
    case ErrorKind::invalid_label: return "invalid-label";
    case ErrorKind::empty_batch: return "empty-batch";
    case ErrorKind::invalid_action: return "invalid-action";
    case ErrorKind::empty_matrix: return "empty-matrix";
    case ErrorKind::invalid_window: return "invalid-window";
    case ErrorKind::invalid_tail: return "invalid-tail";
    case ErrorKind::missing_split: return "missing-split";
    case ErrorKind::missing_class: return "dataset-missing-class";
    case ErrorKind::checkpoint_load: return "checkpoint-load";
    case ErrorKind::numeric: return "numeric-failure";
  }
  return "unknown";
}

std::vector<double> hamming(std::size_t len) {
  std::vector<double> w(len, 1.0);
  if (len < 2) return w;
  for (std::size_t n = 0; n < len; ++n)
    w[n] = 0.54 - 0.46 * std::cos(2.0 * kPi * double(n) / double(len - 1));
  return w;
}

unsigned worker_threads() {
  if (const char* env = std::getenv("JAMLAB_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v >= 1) return unsigned(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(worker_threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace jamlab
