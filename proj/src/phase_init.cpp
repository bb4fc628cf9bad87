#include "qprob/phase_init.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "qprob/error.hpp"
#include "qprob/format.hpp"

namespace qprob {

namespace {

using cd = std::complex<double>;

double beta_extent(const InitialState& s, double alpha) {
  return 2.0 * (std::abs(alpha - s.mean_position()) + s.support_radius(1e-32));
}

double phase_slope_bound(const InitialState& s, double v) {
  return std::abs(v) + std::abs(s.mean_velocity()) + (std::abs(s.separation()) + 8.0 * s.sigma()) / (s.sigma() * s.sigma());
}

}  // namespace

double initial_density(const InitialState& state, double alpha, double v, const QuadratureOptions& opt) {
  if (!std::isfinite(alpha) || !std::isfinite(v)) fail(ErrorKind::InvalidParameter, "initial_density needs finite arguments");
  auto f = [&](double b) {
    cd a = state.amplitude(alpha + 0.5 * b) * std::conj(state.amplitude(alpha - 0.5 * b));
    return std::polar(1.0, -v * b) * a;
  };
  auto r = integrate_panels(f, 0.0, beta_extent(state, alpha), phase_slope_bound(state, v), opt);
  return r.value.real() / M_PI;
}

std::vector<double> tabulate_phase_density(const InitialState& state, const Grid& alpha_grid, const Grid& v_grid,
                                           int threads) {
  const std::size_t na = alpha_grid.count, nv = v_grid.count;
  std::vector<double> out(na * nv, 0.0);
  const double kc = state.mean_velocity();
  const double vr = state.velocity_radius(1e-17);
  const double vmax = std::max(std::abs(v_grid.lo - kc), std::abs(v_grid.hi() - kc));
  const double db = 0.9 * 2.0 * M_PI / (vmax + vr + 1.0);
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (std::size_t i = 0; i < na; ++i) {
    const double alpha = alpha_grid.at(i);
    const std::size_t K = static_cast<std::size_t>(std::ceil(beta_extent(state, alpha) / db)) + 1;
    std::vector<double> ar(K), ai(K), zr(K), zi(K), rr(K), ri(K), beta(K);
    for (std::size_t k = 0; k < K; ++k) {
      beta[k] = db * static_cast<double>(k);
      cd a = state.amplitude(alpha + 0.5 * beta[k]) * std::conj(state.amplitude(alpha - 0.5 * beta[k]));
      double w = k == 0 ? 0.5 : 1.0;
      ar[k] = w * a.real();
      ai[k] = w * a.imag();
      rr[k] = std::cos(v_grid.step * beta[k]);
      ri[k] = -std::sin(v_grid.step * beta[k]);
    }
    for (std::size_t j = 0; j < nv; ++j) {
      if (j % 256 == 0) {
        for (std::size_t k = 0; k < K; ++k) {
          zr[k] = std::cos(v_grid.at(j) * beta[k]);
          zi[k] = -std::sin(v_grid.at(j) * beta[k]);
        }
      }
      double s = 0.0;
      for (std::size_t k = 0; k < K; ++k) s += zr[k] * ar[k] - zi[k] * ai[k];
      out[i * nv + j] = s * db / M_PI;
      for (std::size_t k = 0; k < K; ++k) {
        double t = zr[k] * rr[k] - zi[k] * ri[k];
        zi[k] = zr[k] * ri[k] + zi[k] * rr[k];
        zr[k] = t;
      }
    }
  }
  return out;
}

PhaseSpaceDensity::PhaseSpaceDensity(InitialState state, Grid alpha_grid, Grid v_grid, std::vector<double> values)
    : state_(std::move(state)), alpha_grid_(alpha_grid), v_grid_(v_grid), values_(std::move(values)) {
  const double cell = alpha_grid_.step * v_grid_.step;
  cumulative_.resize(values_.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < values_.size(); ++n) {
    double m = values_[n] * cell;
    if (m > 0) pos_mass_ += m; else neg_mass_ -= m;
    acc += std::abs(m);
    cumulative_[n] = acc;
  }
  for (std::size_t i = 0; i < alpha_grid_.count; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < v_grid_.count; ++j) s += value(i, j);
    marginal_error_ = std::max(marginal_error_, std::abs(s * v_grid_.step - state_.density(alpha_grid_.at(i))));
  }
}

PhaseSpaceDensity build_phase_density(const InitialState& state, const Grid& alpha_grid, const Grid& v_grid,
                                      int threads) {
  if (alpha_grid.count < 2 || v_grid.count < 2) fail(ErrorKind::InvalidParameter, "phase-space grids need at least 2 points");
  double covered = 0.0;
  for (std::size_t i = 0; i < alpha_grid.count; ++i) covered += state.density(alpha_grid.at(i));
  covered *= alpha_grid.step;
  if (std::abs(1.0 - covered) > 1e-6) {
    double r = state.support_radius(1e-12);
    fail(ErrorKind::GridTooNarrow, "alpha grid misses " + format_double(1.0 - covered) +
                                       " of the initial density; suggested alpha bounds [" +
                                       format_double(state.mean_position() - r) + ", " +
                                       format_double(state.mean_position() + r) + "]");
  }
  PhaseSpaceDensity d(state, alpha_grid, v_grid, tabulate_phase_density(state, alpha_grid, v_grid, threads));
  if (d.marginal_error() > 1e-6 || d.normalization_error() > 1e-6) {
    double r = state.velocity_radius(1e-12);
    fail(ErrorKind::GridTooNarrow, "velocity grid too narrow or coarse (marginal error " +
                                       format_double(d.marginal_error()) + "); suggested v bounds [" +
                                       format_double(state.mean_velocity() - r) + ", " +
                                       format_double(state.mean_velocity() + r) + "]");
  }
  return d;
}

InitialDraw sample_initial(const PhaseSpaceDensity& density, Rng& rng) {
  const auto& cum = density.cumulative();
  double u = rng.uniform() * cum.back();
  std::size_t n = std::min<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin(), cum.size() - 1);
  const std::size_t nv = density.v_grid().count;
  const std::size_t i = n / nv, j = n % nv;
  InitialDraw d;
  d.alpha0 = density.alpha_grid().at(i) + (rng.uniform() - 0.5) * density.alpha_grid().step;
  d.v0 = density.v_grid().at(j) + (rng.uniform() - 0.5) * density.v_grid().step;
  d.sign = density.values()[n] >= 0.0 ? 1 : -1;
  d.mass = density.total_mass();
  return d;
}

Grid default_init_alpha_grid(const InitialState& state) {
  double r = state.support_radius(1e-13);
  double step = state.sigma() / 25.0;
  return Grid::aligned(state.mean_position() - r, state.mean_position() + r, step);
}

Grid default_init_v_grid(const InitialState& state) {
  double r = state.velocity_radius(1e-13);
  double step = 1.0 / (25.0 * state.sigma());
  if (state.kind() == InitialState::Kind::TwoPacketSuperposition) {
    step = std::min(step, 2.0 * M_PI / (25.0 * (std::abs(state.separation()) + 4.0 * state.sigma())));
  }
  return Grid::aligned(state.mean_velocity() - r, state.mean_velocity() + r, step);
}

}  // namespace qprob
