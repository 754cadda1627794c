#include "modwhittle/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace modwhittle::fft {
namespace {

// FFTW planning is not thread-safe, execution with the new-array interface
// is. Plans are created once per (size, sign) and never destroyed.
class PlanCache {
 public:
  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void execute(std::span<const cplx> in, std::span<cplx> out, int sign) {
  if (in.empty()) return;
  fftw_plan p = cache().get(in.size(), sign);
  // fftw_execute_dft does not modify the input for out-of-place plans.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(p, src, dst);
}

}  // namespace

std::vector<cplx> forward(std::span<const cplx> x) {
  std::vector<cplx> out(x.size());
  execute(x, out, FFTW_FORWARD);
  return out;
}

std::vector<cplx> backward(std::span<const cplx> x) {
  std::vector<cplx> out(x.size());
  execute(x, out, FFTW_BACKWARD);
  return out;
}

void forward_inplace(std::vector<cplx>& x) { x = forward(x); }
void backward_inplace(std::vector<cplx>& x) { x = backward(x); }

std::vector<cplx> autocorrelation(std::span<const cplx> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::vector<cplx> padded(2 * n, cplx{0.0, 0.0});
  std::copy(x.begin(), x.end(), padded.begin());
  auto spec = forward(padded);
  for (auto& v : spec) v = cplx{std::norm(v), 0.0};
  auto acf = backward(spec);
  // backward(|X|^2)[tau] = 2n * sum_t x_{t+tau} conj(x_t)
  std::vector<cplx> out(n);
  const double scale = 1.0 / static_cast<double>(2 * n);
  for (std::size_t tau = 0; tau < n; ++tau) out[tau] = acf[tau] * scale;
  return out;
}

}  // namespace modwhittle::fft
