#include "qprob/kernel.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qprob/error.hpp"
#include "qprob/format.hpp"

namespace qprob {

namespace {

using cd = std::complex<double>;

// Phase y*b + sum_j c_j b^j of the oscillatory route; c[1] holds y.
struct PolyPhase {
  std::vector<double> c;
  int degree = 0;

  PolyPhase(const Potential& pot, double y, double alpha) {
    c = pot.odd_phase_coefficients(alpha);
    if (c.size() < 2) c.resize(2, 0.0);
    c[1] += y;
    degree = static_cast<int>(c.size()) - 1;
    while (degree > 1 && c[degree] == 0.0) --degree;
  }

  cd value(cd b) const {
    cd v = 0.0;
    for (int j = degree; j >= 1; --j) v = v * b + c[j];
    return v * b;
  }
  double deriv(double b) const {
    double v = 0.0;
    for (int j = degree; j >= 1; --j) v = v * b + j * c[j];
    return v;
  }
  double slope_bound(double r) const {
    double v = 0.0;
    for (int j = degree; j >= 1; --j) v = v * r + j * std::abs(c[j]);
    return v;
  }
  double lead() const { return c[degree]; }
  // Scale of b over which the leading term varies by one radian.
  double beta_scale() const { return std::pow(std::abs(lead()), -1.0 / degree); }

  // Fujiwara bound on the moduli of the roots of the derivative.
  double root_bound() const {
    const int n = degree - 1;
    const double an = degree * c[degree];
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
      double ai = (i + 1) * c[i + 1];
      double r = std::abs(ai / an);
      if (i == 0) r *= 0.5;
      m = std::max(m, std::pow(r, 1.0 / (n - i)));
    }
    return 2.0 * m;
  }

  // Largest positive real root of the derivative, 0 when there is none.
  double last_stationary_point() const {
    double hi = root_bound();
    if (!(hi > 0.0)) return 0.0;
    const int samples = 512;
    const double sgn = lead() > 0 ? 1.0 : -1.0;
    double prev = hi;
    for (int i = samples - 1; i >= 0; --i) {
      double b = hi * i / samples;
      if (sgn * deriv(b) <= 0.0) {
        double lo = b, up = prev;
        for (int it = 0; it < 100; ++it) {
          double mid = 0.5 * (lo + up);
          if (sgn * deriv(mid) <= 0.0) lo = mid; else up = mid;
        }
        return up;
      }
      prev = b;
    }
    return 0.0;
  }
};

enum class OscKind { Value, Vacuum, Cdf };

// (1/pi) x {Re, Im, Im} of int_0^inf w(b) e^{i Phi(b)} db with w = 1, b, 1/b.
double oscillatory_integral(const PolyPhase& ph, OscKind kind, const QuadratureOptions& opt,
                            double* err_out) {
  const double scale = ph.beta_scale();
  const double b_end = std::max(1.1 * ph.last_stationary_point(), scale);
  auto weight = [kind](cd b) -> cd {
    if (kind == OscKind::Vacuum) return b;
    if (kind == OscKind::Cdf) return 1.0 / b;
    return 1.0;
  };
  auto slope_real = [&](double b) { return ph.slope_bound(b); };
  QuadratureResult seg;
  if (kind == OscKind::Cdf) {
    seg = integrate_panels([&](double b) { return cd(std::sin(ph.value(b).real()) / b, 0.0); }, 0.0,
                           b_end, slope_real, opt);
  } else {
    seg = integrate_panels([&](double b) { return weight(b) * std::exp(cd(0.0, 1.0) * ph.value(b)); },
                           0.0, b_end, slope_real, opt);
  }

  const double theta = (ph.lead() > 0 ? 1.0 : -1.0) * M_PI / (2.0 * ph.degree);
  const cd dir = std::polar(1.0, theta);
  auto on_ray = [&](double t) { return b_end + t * dir; };
  double t_end = scale;
  for (int it = 0; it < 200 && ph.value(on_ray(t_end)).imag() < 40.0; ++it) t_end *= 2.0;
  auto ray = integrate_panels(
      [&](double t) {
        cd b = on_ray(t);
        return dir * weight(b) * std::exp(cd(0.0, 1.0) * ph.value(b));
      },
      0.0, t_end, [&](double t) { return ph.slope_bound(b_end + t); }, opt);

  if (err_out) *err_out = (seg.error + ray.error) / M_PI;
  cd total = seg.value + ray.value;
  switch (kind) {
    case OscKind::Value: return total.real() / M_PI;
    case OscKind::Vacuum: return total.imag() / M_PI;
    case OscKind::Cdf: return 0.5 + (seg.value.real() + ray.value.imag()) / M_PI;
  }
  return 0.0;
}

enum class GridKind { Value, CellMass };

// Pi (or its mass over the cell [y - dy/2, y + dy/2]) on a uniform absolute y grid for an odd
// polynomial phase. On the line b = t + i eta with sign(eta) = sign(lead), |e^{i g}| decays at
// least like a Gaussian, G(-t) = conj(G(t)) and
// Pi(y) = e^{-y eta} / pi * Re int_0^inf e^{i y t} G(t) dt, which the trapezoid rule resolves
// to near machine precision for every y at once. Cell masses use the extra factor 2 sin(b dy/2) / b.
std::vector<double> oscillatory_on_grid(const Potential& pot, double alpha, const Grid& y, GridKind kind) {
  const PolyPhase ph(pot, 0.0, alpha);
  const double ymax = std::max(std::abs(y.lo), std::abs(y.hi()));
  // e^{|y eta|} amplifies rounding; keep it below e^6
  const double eta = (ph.lead() > 0 ? 1.0 : -1.0) * std::min(ph.beta_scale(), 6.0 / std::max(ymax, 1e-300));
  const cd i(0.0, 1.0);
  const double hd = 0.5 * y.step;
  auto G = [&](double t) {
    const cd b(t, eta);
    cd w = 1.0;
    if (kind == GridKind::CellMass) w = std::abs(b) < 1e-8 ? cd(2.0 * hd) : 2.0 * std::sin(b * hd) / b;
    return w * std::exp(i * ph.value(b));
  };
  const double g0 = -ph.value(cd(0.0, eta)).imag();
  double t_end = ph.beta_scale();
  for (int it = 0; it < 200 && -ph.value(cd(t_end, eta)).imag() - g0 > -40.0; ++it) t_end *= 1.5;
  const double dt = M_PI / (2.0 * (ymax + hd + ph.slope_bound(t_end + std::abs(eta))));
  const auto nt = static_cast<std::size_t>(std::ceil(t_end / dt));
  std::vector<double> acc(y.count, 0.0);
  for (std::size_t k = 0; k <= nt; ++k) {
    const double t = dt * static_cast<double>(k);
    const cd gk = (k == 0 ? 0.5 * dt : dt) * G(t);
    const cd rot = std::polar(1.0, y.step * t);
    cd z;
    for (std::size_t j = 0; j < y.count; ++j) {
      if (j % 256 == 0) z = std::polar(1.0, y.at(j) * t);
      acc[j] += (gk * z).real();
      z *= rot;
    }
  }
  for (std::size_t j = 0; j < y.count; ++j) acc[j] *= std::exp(-y.at(j) * eta) / M_PI;
  return acc;
}

bool is_growth_free_polynomial(const Potential& pot) {
  return pot.is_polynomial() && pot.coefficients().size() <= 2;
}

std::string alpha_tag(double alpha) { return "alpha=" + format_double(alpha) + ": "; }

// e^{iD} - 1 without cancellation for small D.
cd expm1i(double d) {
  double s = std::sin(0.5 * d);
  return cd(-2.0 * s * s, std::sin(d));
}

}  // namespace

const char* to_string(KernelRoute route) {
  switch (route) {
    case KernelRoute::AtomOnly: return "atom-only";
    case KernelRoute::TailSubtracted: return "tail-subtracted";
    case KernelRoute::Oscillatory: return "oscillatory";
  }
  return "?";
}

KernelRoute kernel_route(const Potential& pot, double alpha) {
  if (pot.has_vanishing_tails()) return KernelRoute::TailSubtracted;
  auto e = pot.odd_phase_coefficients(alpha);
  for (double v : e)
    if (v != 0.0) return KernelRoute::Oscillatory;
  return KernelRoute::AtomOnly;
}

double reference_location(const Potential& pot, double alpha) {
  return pot.has_vanishing_tails() ? -pot.force(alpha) : 0.0;
}

double effective_range(const Potential& pot, double alpha, double tail_tol) {
  if (!(tail_tol > 0.0)) fail(ErrorKind::InvalidParameter, "tail_tol must be positive");
  if (is_growth_free_polynomial(pot)) return 0.0;
  if (!pot.has_vanishing_tails()) {
    fail(ErrorKind::NotApplicable, "effective range is not defined for " + pot.spec() +
                                       " (potential grows at infinity)");
  }
  auto tail = [&](double b) {
    return std::abs(pot.value(alpha + 0.5 * b)) + std::abs(pot.value(alpha - 0.5 * b));
  };
  const auto& bumps = pot.bumps();
  const double n = static_cast<double>(bumps.size());
  double start = 0.0;
  double wmin = std::numeric_limits<double>::infinity();
  for (auto& b : bumps) {
    double l = std::log(2.0 * n * std::abs(b.height) / tail_tol);
    double r = l > 0.0 ? b.width * std::sqrt(2.0 * l) : 0.0;
    start = std::max(start, 2.0 * (std::abs(alpha - b.center) + r));
    wmin = std::min(wmin, b.width);
  }
  // beyond `start` the bound holds; walk down to the last crossing
  const double step = wmin / 16.0;
  double b = start;
  while (b > 0.0 && tail(b) < tail_tol) b -= step;
  double beta_star = 0.0;
  if (b > 0.0 || tail(0.0) >= tail_tol) {
    double lo = std::max(b, 0.0), hi = std::max(b, 0.0) + step;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      if (tail(mid) >= tail_tol) lo = mid; else hi = mid;
    }
    beta_star = hi;
  }
  const double two_pi = 2.0 * M_PI;
  return two_pi * std::ceil(beta_star / two_pi);
}

KernelValue kernel_value(const Potential& pot, double y, double alpha, const KernelOptions& opt) {
  if (!std::isfinite(y) || !std::isfinite(alpha)) fail(ErrorKind::InvalidParameter, "kernel_value needs finite y and alpha");
  KernelValue kv;
  switch (kernel_route(pot, alpha)) {
    case KernelRoute::AtomOnly:
      kv.atom_weight = 1.0;
      return kv;
    case KernelRoute::TailSubtracted: {
      const double f = pot.force(alpha);
      const double u = y + f;
      const double lambda = effective_range(pot, alpha, opt.tail_tol);
      kv.atom_location = -f;
      kv.atom_weight = 1.0;
      if (lambda == 0.0) return kv;
      auto r = integrate_panels(
          [&](double b) { return cd(std::cos(u * b), std::sin(u * b)) * expm1i(pot.difference(alpha, b)); },
          0.0, lambda, std::abs(u) + pot.max_slope(), opt.quad);
      kv.continuous = r.value.real() / M_PI;
      kv.error = r.error / M_PI;
      return kv;
    }
    case KernelRoute::Oscillatory: {
      PolyPhase ph(pot, y, alpha);
      kv.continuous = oscillatory_integral(ph, OscKind::Value, opt.quad, &kv.error);
      return kv;
    }
  }
  return kv;
}

double kernel_vacuum_value(const Potential& pot, double y, double alpha, const KernelOptions& opt) {
  switch (kernel_route(pot, alpha)) {
    case KernelRoute::AtomOnly:
      return 0.0;
    case KernelRoute::TailSubtracted: {
      const double u = y + pot.force(alpha);
      const double lambda = effective_range(pot, alpha, opt.tail_tol);
      if (lambda == 0.0) return 0.0;
      auto r = integrate_panels(
          [&](double b) { return b * cd(std::cos(u * b), std::sin(u * b)) * expm1i(pot.difference(alpha, b)); },
          0.0, lambda, std::abs(u) + pot.max_slope(), opt.quad);
      return r.value.imag() / M_PI;
    }
    case KernelRoute::Oscillatory: {
      PolyPhase ph(pot, y, alpha);
      return oscillatory_integral(ph, OscKind::Vacuum, opt.quad, nullptr);
    }
  }
  return 0.0;
}

double kernel_cdf(const Potential& pot, double y, double alpha, const KernelOptions& opt) {
  if (kernel_route(pot, alpha) != KernelRoute::Oscillatory) {
    fail(ErrorKind::NotApplicable, "kernel_cdf is only defined on the oscillatory route");
  }
  PolyPhase ph(pot, y, alpha);
  return oscillatory_integral(ph, OscKind::Cdf, opt.quad, nullptr);
}

std::vector<double> tail_subtracted_on_grid(const Potential& pot, double alpha, double lambda,
                                            const Grid& u, bool vacuum) {
  std::vector<double> out(u.count, 0.0);
  if (lambda <= 0.0 || u.count == 0) return out;
  double wmin = std::numeric_limits<double>::infinity();
  for (auto& b : pot.bumps()) wmin = std::min(wmin, b.width);
  const double u_max = std::max(std::abs(u.lo), std::abs(u.hi()));
  const double u_decay = pot.max_slope() + 10.0 / wmin;
  const double db0 = 0.9 * 2.0 * M_PI / (u_max + u_decay);
  const std::size_t K = static_cast<std::size_t>(std::ceil(lambda / db0));
  const double db = lambda / static_cast<double>(K);

  // trapezoid on [0, lambda]; the integrand vanishes at b = 0
  std::vector<double> beta(K), hre(K), him(K);
  for (std::size_t k = 0; k < K; ++k) {
    double b = db * static_cast<double>(k + 1);
    cd h = expm1i(pot.difference(alpha, b));
    double w = (k + 1 == K) ? 0.5 : 1.0;
    if (vacuum) w *= b;
    beta[k] = b;
    hre[k] = w * h.real();
    him[k] = w * h.imag();
  }
  std::vector<double> zr(K), zi(K), rr(K), ri(K);
  for (std::size_t k = 0; k < K; ++k) {
    rr[k] = std::cos(u.step * beta[k]);
    ri[k] = std::sin(u.step * beta[k]);
  }
  const double scale = db / M_PI;
  for (std::size_t j = 0; j < u.count; ++j) {
    if (j % 256 == 0) {
      const double uj = u.at(j);
      for (std::size_t k = 0; k < K; ++k) {
        zr[k] = std::cos(uj * beta[k]);
        zi[k] = std::sin(uj * beta[k]);
      }
    }
    double s = 0.0;
    if (vacuum) {
      for (std::size_t k = 0; k < K; ++k) s += zr[k] * him[k] + zi[k] * hre[k];
    } else {
      for (std::size_t k = 0; k < K; ++k) s += zr[k] * hre[k] - zi[k] * him[k];
    }
    out[j] = scale * s;
    for (std::size_t k = 0; k < K; ++k) {
      double a = zr[k] * rr[k] - zi[k] * ri[k];
      zi[k] = zr[k] * ri[k] + zi[k] * rr[k];
      zr[k] = a;
    }
  }
  return out;
}

double KernelColumn::continuous_integral() const {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

namespace {

constexpr std::int32_t kAtom = -1;
constexpr std::int32_t kTailLo = -2;
constexpr std::int32_t kTailHi = -3;

void finish_column(KernelColumn& c) {
  c.pos_mass = c.atom_weight;
  c.neg_mass = 0.0;
  c.cumulative.clear();
  c.items.clear();
  double acc = 0.0;
  auto add = [&](double m, std::int32_t code) {
    if (m > 0.0) c.pos_mass += m; else c.neg_mass -= m;
    if (m == 0.0) return;
    acc += std::abs(m);
    c.cumulative.push_back(acc);
    c.items.push_back(code);
  };
  if (c.atom_weight > 0.0) {
    acc += c.atom_weight;
    c.cumulative.push_back(acc);
    c.items.push_back(kAtom);
  }
  if (c.mass.size() != c.continuous.size()) {
    c.mass.resize(c.continuous.size());
    for (std::size_t k = 0; k < c.continuous.size(); ++k) c.mass[k] = c.weights[k] * c.continuous[k];
  }
  for (std::size_t k = 0; k < c.mass.size(); ++k) add(c.mass[k], static_cast<std::int32_t>(k));
  add(c.tail_lo, kTailLo);
  add(c.tail_hi, kTailHi);
  c.normalization_error = std::abs(c.atom_weight + c.continuous_integral() + c.tail_lo + c.tail_hi - 1.0);
}

std::string suggest(const Grid& g, double factor) {
  double mid = 0.5 * (g.lo + g.hi());
  double half = 0.5 * (g.hi() - g.lo) * factor;
  return "suggested y bounds [" + format_double(mid - half) + ", " + format_double(mid + half) + "]";
}

}  // namespace

double kernel_width(const Potential& pot, double alpha) {
  if (kernel_route(pot, alpha) != KernelRoute::Oscillatory) return 0.0;
  return 1.0 / PolyPhase(pot, 0.0, alpha).beta_scale();
}

KernelColumn decompose_column(const Potential& pot, double alpha, const Grid& y_grid, const KernelOptions& opt) {
  KernelColumn c;
  c.alpha = alpha;
  c.route = kernel_route(pot, alpha);
  c.reference = reference_location(pot, alpha);
  c.lambda = is_growth_free_polynomial(pot) ? 0.0 : std::numeric_limits<double>::quiet_NaN();

  if (c.route == KernelRoute::Oscillatory) {
    PolyPhase ph(pot, 0.0, alpha);
    double y_scale = 1.0 / ph.beta_scale();
    if (y_scale < 4.0 * y_grid.step) {
      c.unresolved = true;
      c.route = KernelRoute::AtomOnly;
    }
  }
  if (c.route == KernelRoute::AtomOnly) {
    c.atom_location = c.reference;
    c.atom_weight = 1.0;
    finish_column(c);
    return c;
  }
  if (y_grid.count < 8) fail(ErrorKind::InvalidParameter, "noise grid needs at least 8 points");

  auto reject = [&](const std::string& msg) {
    if (opt.strict) fail(ErrorKind::GridTooNarrow, alpha_tag(alpha) + msg);
    c.truncated = true;
  };
  c.y_grid = Grid{y_grid.lo + c.reference, y_grid.step, y_grid.count};
  c.weights = gregory_weights(y_grid.count, y_grid.step);

  if (c.route == KernelRoute::TailSubtracted) {
    c.lambda = effective_range(pot, alpha, opt.tail_tol);
    c.atom_location = c.reference;
    c.atom_weight = 1.0;
    if (y_grid.step * c.lambda > 2.0 * M_PI) {
      reject("noise step " + format_double(y_grid.step) + " aliases the kernel; need step < 2 pi / lambda = " +
             format_double(2.0 * M_PI / c.lambda));
    }
    c.continuous = tail_subtracted_on_grid(pot, alpha, c.lambda, y_grid);
    const std::size_t n = c.continuous.size();
    double edge = 0.0;
    for (std::size_t k = 0; k < std::min<std::size_t>(4, n); ++k)
      edge = std::max({edge, std::abs(c.continuous[k]), std::abs(c.continuous[n - 1 - k])});
    if (edge * (y_grid.hi() - y_grid.lo) > 1e-6) {
      reject("continuous part not negligible at the noise grid edge; " + suggest(y_grid, 2.0));
    }
  } else {
    // exact cell masses over [lo - dy/2, hi + dy/2]; the tails beyond are lumped at the edges
    const double hd = 0.5 * y_grid.step;
    c.weights.assign(y_grid.count, y_grid.step);
    c.continuous = oscillatory_on_grid(pot, alpha, c.y_grid, GridKind::Value);
    c.mass = oscillatory_on_grid(pot, alpha, c.y_grid, GridKind::CellMass);
    c.tail_lo = kernel_cdf(pot, c.y_grid.lo - hd, alpha, opt);
    c.tail_hi = 1.0 - kernel_cdf(pot, c.y_grid.hi() + hd, alpha, opt);
    if (std::min(std::abs(c.tail_lo), std::abs(c.tail_hi)) > 1e-6) {
      reject("decaying side of the kernel is truncated; " + suggest(y_grid, 2.0));
    }
  }
  finish_column(c);
  if (c.normalization_error > 1e-4) {
    reject("normalization deficit " + format_double(c.normalization_error) + "; " + suggest(y_grid, 2.0));
  }
  return c;
}

NoiseDraw sample_noise(const KernelColumn& column, Rng& rng) {
  NoiseDraw d;
  d.mass = column.total_mass();
  if (column.items.size() == 1 && column.items[0] == kAtom) {
    d.y = column.atom_location;
    return d;
  }
  double u = rng.uniform() * column.cumulative.back();
  auto it = std::upper_bound(column.cumulative.begin(), column.cumulative.end(), u);
  std::size_t idx = std::min<std::size_t>(it - column.cumulative.begin(), column.items.size() - 1);
  std::int32_t code = column.items[idx];
  d.atom = code == kAtom;
  if (code == kAtom) {
    d.y = column.atom_location;
  } else if (code == kTailLo) {
    d.y = column.y_grid.lo;
    d.sign = column.tail_lo > 0 ? 1 : -1;
  } else if (code == kTailHi) {
    d.y = column.y_grid.hi();
    d.sign = column.tail_hi > 0 ? 1 : -1;
  } else {
    // uniform within the node's cell
    d.y = column.y_grid.at(static_cast<std::size_t>(code)) + (rng.uniform() - 0.5) * column.y_grid.step;
    d.sign = column.mass[static_cast<std::size_t>(code)] > 0 ? 1 : -1;
  }
  return d;
}

TransitionKernelTable::TransitionKernelTable(Potential pot, Grid alpha_grid, Grid y_grid,
                                             std::vector<KernelColumn> columns)
    : pot_(std::move(pot)), alpha_grid_(alpha_grid), y_grid_(y_grid), columns_(std::move(columns)) {
  for (auto& c : columns_) all_atom_only_ = all_atom_only_ && c.route == KernelRoute::AtomOnly;
}

NoiseDraw TransitionKernelTable::sample(double alpha, Rng& rng) const {
  const double ref = reference_location(pot_, alpha);
  if (all_atom_only_) return NoiseDraw{ref, 1, 1.0, true};
  double pos = (alpha - alpha_grid_.lo) / alpha_grid_.step;
  std::size_t i = static_cast<std::size_t>(std::floor(pos));
  if (i >= columns_.size() - 1) i = columns_.size() - 1;
  double t = pos - static_cast<double>(i);
  std::size_t pick = i;
  if (t > 0.0 && i + 1 < columns_.size() && rng.uniform() < t) pick = i + 1;
  const KernelColumn& col = columns_[pick];
  NoiseDraw d = sample_noise(col, rng);
  d.y = d.atom ? ref : d.y + (ref - col.reference);
  return d;
}

namespace {

void check_table_grids(const Grid& alpha_grid, const Grid& y_grid) {
  if (alpha_grid.count < 2) fail(ErrorKind::InvalidParameter, "alpha grid needs at least 2 points");
  if (!(alpha_grid.step > 0.0) || !(y_grid.step > 0.0)) fail(ErrorKind::InvalidParameter, "grid steps must be positive");
}

}  // namespace

TransitionKernelTable build_table(const Potential& pot, const Grid& alpha_grid, const Grid& y_grid,
                                  const KernelOptions& opt, int threads) {
  check_table_grids(alpha_grid, y_grid);
  std::vector<KernelColumn> cols(alpha_grid.count);
  std::vector<std::string> errors(alpha_grid.count);
  std::vector<ErrorKind> kinds(alpha_grid.count, ErrorKind::InvalidParameter);
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (std::size_t i = 0; i < alpha_grid.count; ++i) {
    try {
      cols[i] = decompose_column(pot, alpha_grid.at(i), y_grid, opt);
    } catch (const Error& e) {
      errors[i] = e.what();
      kinds[i] = e.kind();
    }
  }
  // report the lowest failing column so the message does not depend on scheduling
  for (std::size_t i = 0; i < alpha_grid.count; ++i)
    if (!errors[i].empty()) fail(kinds[i], "kernel table: " + errors[i]);
  return TransitionKernelTable(pot, alpha_grid, y_grid, std::move(cols));
}

TransitionKernelTable build_table_serial(const Potential& pot, const Grid& alpha_grid, const Grid& y_grid,
                                         const KernelOptions& opt) {
  check_table_grids(alpha_grid, y_grid);
  std::vector<KernelColumn> cols;
  cols.reserve(alpha_grid.count);
  for (std::size_t i = 0; i < alpha_grid.count; ++i) {
    try {
      cols.push_back(decompose_column(pot, alpha_grid.at(i), y_grid, opt));
    } catch (const Error& e) {
      fail(e.kind(), std::string("kernel table: ") + e.what());
    }
  }
  return TransitionKernelTable(pot, alpha_grid, y_grid, std::move(cols));
}

}  // namespace qprob
