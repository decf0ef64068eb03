#pragma once

#include <complex>
#include <span>

#include <fftw3.h>

namespace pconf::detail {

// Owns an FFTW plan for `howmany` contiguous complex transforms of length n (rank 1),
// or one n x n transform (rank 2). Transforms are unnormalized, as in FFTW.
// Plans are created with FFTW_ESTIMATE so results do not depend on timing, and
// FFTW_UNALIGNED so any std::vector buffer can be passed to execute.
class FftPlan {
 public:
  enum class Kind { batch_1d, square_2d };

  FftPlan(Kind kind, int n, int howmany = 1);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  int n() const { return n_; }
  std::size_t length() const { return length_; }

  // In-place; data.size() must equal length(). Safe to call concurrently on distinct buffers.
  void forward(std::span<std::complex<double>> data) const;
  void backward(std::span<std::complex<double>> data) const;

 private:
  int n_;
  std::size_t length_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace pconf::detail
