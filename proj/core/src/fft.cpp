#include "fft.hpp"

#include <mutex>
#include <stdexcept>
#include <vector>

namespace pconf::detail {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlan::FftPlan(Kind kind, int n, int howmany) : n_(n) {
  if (n <= 0 || howmany <= 0) throw std::invalid_argument("FFT sizes must be positive");
  length_ = kind == Kind::square_2d ? static_cast<std::size_t>(n) * n : static_cast<std::size_t>(n) * howmany;
  std::vector<std::complex<double>> scratch(length_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  if (kind == Kind::square_2d) {
    fwd_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  } else {
    int dims[1] = {n};
    fwd_ = fftw_plan_many_dft(1, dims, howmany, buf, nullptr, 1, n, buf, nullptr, 1, n, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_many_dft(1, dims, howmany, buf, nullptr, 1, n, buf, nullptr, 1, n, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  if (!fwd_ || !bwd_) throw std::runtime_error("FFTW planning failed");
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(fwd_);
  if (bwd_) fftw_destroy_plan(bwd_);
}

void FftPlan::forward(std::span<std::complex<double>> data) const {
  if (data.size() != length_) throw std::invalid_argument("FFT buffer has the wrong length");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(fwd_, buf, buf);
}

void FftPlan::backward(std::span<std::complex<double>> data) const {
  if (data.size() != length_) throw std::invalid_argument("FFT buffer has the wrong length");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(bwd_, buf, buf);
}

}  // namespace pconf::detail
