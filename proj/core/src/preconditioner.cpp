#include "preconditioner.hpp"

#include <cmath>
#include <stdexcept>

#include "fft.hpp"
#include "stencil.hpp"

namespace pconf::detail {

DirichletPreconditioner::DirichletPreconditioner(const DiskGrid& grid, std::span<const double> ring_scale)
    : grid_(&grid), first_(grid.first_free_ring()), count_(grid.last_free_ring() - grid.first_free_ring() + 1) {
  if (count_ < 1) throw std::invalid_argument("grid " + grid.describe() + " has no free rings to solve for");
  if (ring_scale.empty()) {
    scale_.assign(grid.n_r(), 1.0);
  } else {
    if (ring_scale.size() != static_cast<std::size_t>(grid.n_r()))
      throw std::invalid_argument("preconditioner needs one scale per ring");
    for (double v : ring_scale)
      if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("preconditioner ring scales must be positive");
    scale_.assign(ring_scale.begin(), ring_scale.end());
  }
  const int nr = grid.n_r();
  const int nt = grid.n_theta();
  const double c = 1.0 / grid.dr();
  const double ring_weight = grid.dr() * grid.dtheta();

  for (int parity = 0; parity < 2; ++parity) {
    auto& R = radial_[parity];
    R.assign(count_, {0.0, 0.0, 0.0});
    for (int i = 0; i < nr; ++i) {
      const double w = 0.5 * scale_[i] * grid.radius(i) * ring_weight * c * c;
      for (RadialStencil stencil : {RadialStencil::forward, RadialStencil::backward}) {
        const RadialRow row = radial_row(grid, i, stencil);
        // Fold the antipodal entry onto its ring with the mode's sign.
        std::array<std::pair<int, double>, 3> col{};
        int ncol = 0;
        for (int e = 0; e < row.size; ++e) {
          const auto& en = row.entries[e];
          const double coef = en.antipodal && parity == 1 ? -en.coef : en.coef;
          int at = 0;
          while (at < ncol && col[at].first != en.ring) ++at;
          if (at == ncol) col[ncol++] = {en.ring, 0.0};
          col[at].second += coef;
        }
        for (int x = 0; x < ncol; ++x)
          for (int y = 0; y < ncol; ++y) {
            const int qa = col[x].first - first_;
            const int qb = col[y].first - first_;
            if (qa < 0 || qa >= count_ || qb < 0 || qb >= count_ || qb > qa) continue;
            if (qa - qb > kBand) throw std::logic_error("radial stencil wider than the preconditioner band");
            R[qa][qa - qb] += w * col[x].second * col[y].second;
          }
      }
    }
  }
  angular_weight_.resize(count_);
  for (int q = 0; q < count_; ++q) {
    const double r = grid.radius(first_ + q);
    angular_weight_[q] = scale_[first_ + q] * r * ring_weight / (r * r);
  }
  symbol_.resize(nt);
  for (int m = 0; m < nt; ++m) {
    const int k = m <= nt / 2 ? m : m - nt;
    symbol_[m] = 2 * m == nt ? 0.0 : double(k) * k;
  }

  factors_.assign(static_cast<std::size_t>(nt) * count_, {0.0, 0.0, 0.0});
  for (int m = 0; m < nt; ++m) {
    auto* L = factors_.data() + static_cast<std::size_t>(m) * count_;
    for (int i = 0; i < count_; ++i) {
      for (int j = std::max(0, i - kBand); j <= i; ++j) {
        double s = radial_[m % 2][i][i - j] + (i == j ? symbol_[m] * angular_weight_[i] : 0.0);
        for (int k = std::max(0, i - kBand); k < j; ++k) {
          if (j - k > kBand) continue;
          s -= L[i][i - k] * L[j][j - k];
        }
        if (i == j) {
          if (!(s > 0.0)) throw std::runtime_error("preconditioner is not positive definite");
          L[i][0] = std::sqrt(s);
        } else {
          L[i][i - j] = s / L[j][0];
        }
      }
    }
  }
  fft_ = std::make_unique<FftPlan>(FftPlan::Kind::batch_1d, nt, count_);
}

DirichletPreconditioner::~DirichletPreconditioner() = default;

void DirichletPreconditioner::solve(std::span<const cplx> g, std::span<cplx> out) const {
  const DiskGrid& grid = *grid_;
  const int nt = grid.n_theta();
  const std::size_t offset = grid.index(first_, 0);
  // Ring-major buffer: row q holds the angular samples of free ring q.
  std::vector<cplx> buf(g.begin() + offset, g.begin() + offset + static_cast<std::size_t>(count_) * nt);
  fft_->forward(buf);
  std::vector<cplx> x(count_);
  for (int m = 0; m < nt; ++m) {
    const auto* L = factors_.data() + static_cast<std::size_t>(m) * count_;
    for (int i = 0; i < count_; ++i) {
      cplx s = buf[static_cast<std::size_t>(i) * nt + m];
      for (int k = std::max(0, i - kBand); k < i; ++k) s -= L[i][i - k] * x[k];
      x[i] = s / L[i][0];
    }
    for (int i = count_ - 1; i >= 0; --i) {
      cplx s = x[i];
      for (int k = i + 1; k <= std::min(count_ - 1, i + kBand); ++k) s -= L[k][k - i] * x[k];
      x[i] = s / L[i][0];
    }
    for (int i = 0; i < count_; ++i) buf[static_cast<std::size_t>(i) * nt + m] = x[i];
  }
  fft_->backward(buf);
  const double scale = 1.0 / nt;
  std::fill(out.begin(), out.end(), cplx(0.0));
  for (std::size_t k = 0; k < buf.size(); ++k) out[offset + k] = buf[k] * scale;
}

void DirichletPreconditioner::apply(std::span<const cplx> u, std::span<cplx> out) const {
  const DiskGrid& grid = *grid_;
  const std::size_t n = grid.size();
  std::vector<cplx> masked(n, 0.0), d(n), dt(n), tmp(n);
  for (std::size_t k = 0; k < n; ++k)
    if (!grid.is_pinned(k)) masked[k] = u[k];
  const auto w = grid.weights();
  std::fill(out.begin(), out.end(), cplx(0.0));
  // H u = sum over rules of D^T (w/2 D u) + D_theta^T (w / r^2 D_theta u), D_theta^T = -D_theta.
  for (RadialStencil stencil : {RadialStencil::forward, RadialStencil::backward}) {
    radial_derivative(masked, grid, d, stencil);
    for (std::size_t k = 0; k < n; ++k) d[k] *= 0.5 * scale_[k / grid.n_theta()] * w[k];
    // Reuse the Wirtinger adjoint's radial scatter: with alpha = e^{-i theta} d and
    // beta = e^{i theta} d it returns D^T d (the angular parts cancel).
    std::vector<cplx> alpha(n), beta(n);
    for (int i = 0; i < grid.n_r(); ++i)
      for (int j = 0; j < grid.n_theta(); ++j) {
        const std::size_t k = grid.index(i, j);
        alpha[k] = std::conj(grid.phase(j)) * d[k];
        beta[k] = grid.phase(j) * d[k];
      }
    wirtinger_adjoint(alpha, beta, grid, tmp, stencil);
    for (std::size_t k = 0; k < n; ++k) out[k] += tmp[k];
  }
  angular_derivative(masked, grid, dt);
  for (int i = 0; i < grid.n_r(); ++i)
    for (int j = 0; j < grid.n_theta(); ++j) {
      const std::size_t k = grid.index(i, j);
      dt[k] *= scale_[i] * w[k] / (grid.radius(i) * grid.radius(i));
    }
  angular_derivative(dt, grid, tmp);
  for (std::size_t k = 0; k < n; ++k) out[k] = grid.is_pinned(k) ? cplx(0.0) : out[k] - tmp[k];
}

}  // namespace pconf::detail
