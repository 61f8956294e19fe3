#include "jamlab/common/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <utility>

namespace jamlab {
namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::pair<std::size_t, bool>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  // Plans are created on FFTW-allocated scratch so execution on any buffer
  // with the same alignment is valid via fftw_execute_dft.
  fftw_plan get(std::size_t n, bool inverse) {
    std::lock_guard lock(mutex);
    auto key = std::make_pair(n, inverse);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    auto* buf = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(int(n), buf, buf, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                      FFTW_ESTIMATE);
    fftw_free(buf);
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft_inplace(std::span<cplx> data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0) return;
  fftw_plan plan = cache().get(n, inverse);
  // Copy through an FFTW-aligned buffer so results never depend on the
  // caller's alignment.
  auto* buf = fftw_alloc_complex(n);
  std::memcpy(buf, data.data(), n * sizeof(fftw_complex));
  fftw_execute_dft(plan, buf, buf);
  std::memcpy(static_cast<void*>(data.data()), buf, n * sizeof(fftw_complex));
  fftw_free(buf);
}

}  // namespace jamlab
