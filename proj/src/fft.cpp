#include "swl/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace swl {
namespace {
// The FFTW planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(int dim, std::size_t n) : dim_(dim), n_(n) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("RealFft: dimension must be 1, 2 or 3");
  if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("RealFft: n must be a power of two");
  real_size_ = 1;
  for (int i = 0; i < dim; ++i) real_size_ *= n;
  spectral_size_ = real_size_ / n * (n / 2 + 1);

  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(real_size_);
  spec_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(spectral_size_));
  int dims[3] = {static_cast<int>(n), static_cast<int>(n), static_cast<int>(n)};
  auto* c = reinterpret_cast<fftw_complex*>(spec_);
  plan_fwd_ = fftw_plan_dft_r2c(dim, dims, real_, c, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_c2r(dim, dims, c, real_, FFTW_ESTIMATE);
  if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("RealFft: FFTW planning failed");
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft::forward() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }
void RealFft::backward() { fftw_execute(static_cast<fftw_plan>(plan_bwd_)); }

void RealFft::wavenumbers(std::size_t idx, int out[3]) const {
  const std::size_t half = n_ / 2 + 1;
  const int n = static_cast<int>(n_);
  std::size_t rest = idx;
  out[0] = out[1] = out[2] = 0;
  out[dim_ - 1] = static_cast<int>(rest % half);
  rest /= half;
  for (int a = dim_ - 2; a >= 0; --a) {
    int k = static_cast<int>(rest % n_);
    rest /= n_;
    out[a] = k <= n / 2 ? k : k - n;
  }
}

}  // namespace swl
