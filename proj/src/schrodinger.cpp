#include "qprob/schrodinger.hpp"

#include <algorithm>
#include <cmath>

#include "qprob/error.hpp"
#include "qprob/format.hpp"

namespace qprob {

namespace {

using cd = std::complex<double>;

double band_mass(const Wavefield& w) {
  const std::size_t n = w.psi.size();
  const std::size_t band = std::max<std::size_t>(4, n / 20);
  double m = 0.0;
  for (std::size_t i = 0; i < band; ++i) m += std::norm(w.psi[i]) + std::norm(w.psi[n - 1 - i]);
  return m * w.x.step;
}

}  // namespace

double Wavefield::norm() const {
  double s = 0.0;
  for (auto& p : psi) s += std::norm(p);
  return s * x.step;
}

std::vector<double> Wavefield::density() const {
  std::vector<double> r(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) r[i] = std::norm(psi[i]);
  return r;
}

double Wavefield::mean_position() const {
  double s = 0.0, m = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    s += x.at(i) * std::norm(psi[i]);
    m += std::norm(psi[i]);
  }
  return s / m;
}

double Wavefield::width() const {
  double mu = mean_position(), s = 0.0, m = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    double d = x.at(i) - mu;
    s += d * d * std::norm(psi[i]);
    m += std::norm(psi[i]);
  }
  return std::sqrt(s / m);
}

std::vector<Wavefield> propagate_field(const Wavefield& start, const Potential& pot, double total_time,
                                       std::size_t steps, const PropagationOptions& opt) {
  if (steps < 1 || !(total_time >= 0.0)) fail(ErrorKind::InvalidParameter, "propagate needs steps >= 1 and time >= 0");
  if (opt.snapshots < 1 || opt.snapshots > steps) fail(ErrorKind::InvalidParameter, "snapshots must be in [1, steps]");
  const std::size_t n = start.psi.size();
  const double dx = start.x.step;
  const double dt = total_time / static_cast<double>(steps);
  if (band_mass(start) > opt.leak_tol) {
    fail(ErrorKind::DomainTooSmall, "initial state reaches the boundary band of the domain");
  }
  // A psi_new = B psi_old, A = 1 + i dt/2 H, B = 1 - i dt/2 H
  const cd half(0.0, 0.5 * dt);
  const cd off = -half * (0.5 / (dx * dx));
  std::vector<cd> diag(n), cprime(n), denom(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = 1.0 + half * (1.0 / (dx * dx) + pot.value(start.x.at(i)));
  // Thomas elimination factors for the constant matrix A
  denom[0] = diag[0];
  cprime[0] = off / denom[0];
  for (std::size_t i = 1; i < n; ++i) {
    denom[i] = diag[i] - off * cprime[i - 1];
    cprime[i] = off / denom[i];
  }
  std::vector<cd> bdiag(n);
  for (std::size_t i = 0; i < n; ++i) bdiag[i] = 2.0 - diag[i];
  const cd boff = -off;

  std::vector<Wavefield> out{start};
  Wavefield cur = start;
  std::vector<cd> rhs(n);
  for (std::size_t s = 1; s <= steps; ++s) {
    auto& p = cur.psi;
    for (std::size_t i = 0; i < n; ++i) {
      cd v = bdiag[i] * p[i];
      if (i > 0) v += boff * p[i - 1];
      if (i + 1 < n) v += boff * p[i + 1];
      rhs[i] = v;
    }
    rhs[0] /= denom[0];
    for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - off * rhs[i - 1]) / denom[i];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cprime[i] * rhs[i + 1];
    p.swap(rhs);
    cur.time = start.time + dt * static_cast<double>(s);
    if (s * opt.snapshots % steps == 0 || s == steps) {
      if (out.size() <= opt.snapshots) {
        double leak = band_mass(cur);
        if (leak > opt.leak_tol) {
          fail(ErrorKind::DomainTooSmall, "boundary-mass leakage " + format_double(leak) + " at t = " +
                                              format_double(cur.time) + "; enlarge the reference domain");
        }
        out.push_back(cur);
      }
    }
  }
  return out;
}

std::vector<Wavefield> propagate(const InitialState& state, const Potential& pot, double total_time, std::size_t steps,
                                 const Grid& grid, const PropagationOptions& opt) {
  if (grid.count < 16) fail(ErrorKind::InvalidParameter, "reference grid needs at least 16 points");
  if (opt.check_resolution && state.sigma() / grid.step < 16.0) {
    fail(ErrorKind::InvalidParameter, "reference grid resolves sigma with fewer than 16 points");
  }
  Wavefield w;
  w.x = grid;
  w.psi.resize(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) w.psi[i] = state.amplitude(grid.at(i));
  double nrm = std::sqrt(w.norm());
  for (auto& p : w.psi) p /= nrm;
  return propagate_field(w, pot, total_time, steps, opt);
}

double mean_momentum(const Wavefield& field) {
  static const double c[3] = {45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0};
  const long n = static_cast<long>(field.psi.size());
  auto at = [&](long i) { return (i >= 0 && i < n) ? field.psi[i] : cd(0.0); };
  double j = 0.0;
  for (long i = 0; i < n; ++i) {
    cd d = 0.0;
    for (int k = 1; k <= 3; ++k) d += c[k - 1] * (at(i + k) - at(i - k));
    j += (std::conj(field.psi[i]) * d).imag();
  }
  return j;  // sum conj(psi) (d/dx psi) dx with d/dx = D / dx
}

Wavefield ground_state(const Potential& pot, const Grid& grid) {
  const std::size_t n = grid.count;
  const double dx = grid.step;
  std::vector<double> d(n), v(n);
  double vmin = 1e300;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = pot.value(grid.at(i));
    vmin = std::min(vmin, v[i]);
  }
  const double shift = vmin - 1.0;
  const double off = -0.5 / (dx * dx);
  for (std::size_t i = 0; i < n; ++i) d[i] = 1.0 / (dx * dx) + v[i] - shift;
  std::vector<double> cp(n), den(n), x(n, 1.0), r(n);
  den[0] = d[0];
  cp[0] = off / den[0];
  for (std::size_t i = 1; i < n; ++i) {
    den[i] = d[i] - off * cp[i - 1];
    cp[i] = off / den[i];
  }
  for (int it = 0; it < 500; ++it) {
    r = x;
    r[0] /= den[0];
    for (std::size_t i = 1; i < n; ++i) r[i] = (r[i] - off * r[i - 1]) / den[i];
    for (std::size_t i = n - 1; i-- > 0;) r[i] -= cp[i] * r[i + 1];
    double s = 0.0;
    for (double q : r) s += q * q;
    s = std::sqrt(s * dx);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double q = r[i] / s;
      change = std::max(change, std::abs(q - x[i]));
      x[i] = q;
    }
    if (change < 1e-15) break;
  }
  Wavefield w;
  w.x = grid;
  w.psi.assign(x.begin(), x.end());
  return w;
}

std::vector<double> bin_average(const Grid& x, const std::vector<double>& rho, double lo, double hi, std::size_t count) {
  std::vector<double> out(count, 0.0);
  const double width = (hi - lo) / static_cast<double>(count);
  auto interp = [&](double q) {
    double p = (q - x.lo) / x.step;
    if (p < 0 || p > static_cast<double>(x.count - 1)) return 0.0;
    std::size_t i = std::min(static_cast<std::size_t>(p), x.count - 2);
    double t = p - static_cast<double>(i);
    return (1 - t) * rho[i] + t * rho[i + 1];
  };
  const int sub = std::max(8, 2 * static_cast<int>(std::ceil(width / x.step)));
  for (std::size_t b = 0; b < count; ++b) {
    double a = lo + width * static_cast<double>(b);
    double s = 0.0;
    for (int k = 0; k <= sub; ++k) {
      double wgt = (k == 0 || k == sub) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      s += wgt * interp(a + width * k / sub);
    }
    out[b] = s / (3.0 * sub);
  }
  return out;
}

ReferencePlan default_reference_plan(const InitialState& state, const Potential& pot, double total_time) {
  const double s = state.sigma();
  const double spread = s * std::sqrt(1.0 + total_time * total_time / (4.0 * s * s * s * s));
  double c = state.mean_position();
  double travel = std::abs(state.mean_velocity()) * total_time;
  double half = state.support_radius(1e-14) + travel + 10.0 * spread + 0.5 * std::abs(state.separation());
  if (pot.grows_at_infinity()) half = std::min(half, state.support_radius(1e-14) + std::abs(c) + 10.0 * s + 4.0);
  double dx = std::min(s / 16.0, 0.1);
  ReferencePlan p;
  p.grid = Grid::aligned(c - half, c + half, dx);
  p.steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(total_time / std::min(0.02, 4.0 * dx * dx))));
  return p;
}

}  // namespace qprob
