#include "fft.hpp"

#include <fftw3.h>

#include <cstdint>
#include <map>
#include <mutex>
#include <utility>

namespace onn::detail {
namespace {

// FFTW plan creation is not thread-safe; execution via fftw_execute_dft on
// caller-owned buffers is. FFTW_ESTIMATE keeps plan selection deterministic
// (no runtime measurement), which the bitwise-reproducibility contract needs.
class PlanCache {
 public:
  fftw_plan get(int width, int height, int sign) {
    const Key key{width, height, sign};
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    // Plan out-of-place: fftw_execute_dft requires the execution buffers to
    // have the same in-place/out-of-place kind as the ones used for planning,
    // and fft2/ifft2 always run with distinct in/out arrays.
    const std::size_t count = std::size_t(width) * std::size_t(height);
    fftw_complex* scratch_in = fftw_alloc_complex(count);
    fftw_complex* scratch_out = fftw_alloc_complex(count);
    fftw_plan plan = fftw_plan_dft_2d(height, width, scratch_in, scratch_out, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch_out);
    fftw_free(scratch_in);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  using Key = std::tuple<int, int, int>;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(int width, int height, int sign, const std::complex<double>* in,
             std::complex<double>* out) {
  fftw_plan plan = cache().get(width, height, sign);
  // std::complex<double> is layout-compatible with fftw_complex
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void fft2(int width, int height, const std::complex<double>* in, std::complex<double>* out) {
  execute(width, height, FFTW_FORWARD, in, out);
}

void ifft2(int width, int height, const std::complex<double>* in, std::complex<double>* out) {
  execute(width, height, FFTW_BACKWARD, in, out);
  const double scale = 1.0 / (double(width) * double(height));
  const std::size_t n = std::size_t(width) * std::size_t(height);
  for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
}

}  // namespace onn::detail
