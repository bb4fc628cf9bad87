#include "qprob/chain.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "qprob/error.hpp"
#include "qprob/format.hpp"

namespace qprob {

namespace {

using cd = std::complex<double>;

int thread_count(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

void check_spec(const ChainSpec& spec) {
  if (spec.lattice.n_slices() > spec.cap) {
    fail(ErrorKind::CapExceeded, "dense evaluation is capped at N <= " + std::to_string(spec.cap) + ", got N = " +
                                     std::to_string(spec.lattice.n_slices()));
  }
  if (spec.grid.count < 16) fail(ErrorKind::InvalidParameter, "chain grid needs at least 16 points");
}

// 8-point Lagrange weights (and derivative weights) for fractional position x in [3, 4] of nodes 0..7.
void lagrange8(double x, double* w, double* dw) {
  for (int j = 0; j < 8; ++j) {
    double num = 1.0, den = 1.0, dsum = 0.0;
    for (int m = 0; m < 8; ++m) {
      if (m == j) continue;
      den *= j - m;
      num *= x - m;
    }
    w[j] = num / den;
    if (dw) {
      for (int l = 0; l < 8; ++l) {
        if (l == j) continue;
        double p = 1.0;
        for (int m = 0; m < 8; ++m)
          if (m != j && m != l) p *= x - m;
        dsum += p;
      }
      dw[j] = dsum / den;
    }
  }
}

// Value (or derivative with respect to the node index) of a sampled column at fractional index p.
double sample_column(const std::vector<double>& f, double p, bool derivative) {
  const long n = static_cast<long>(f.size());
  double r = std::round(p);
  if (!derivative && std::abs(p - r) < 1e-9) {
    long i = static_cast<long>(r);
    return (i >= 0 && i < n) ? f[i] : 0.0;
  }
  long base = static_cast<long>(std::floor(p)) - 3;
  double w[8], dw[8];
  lagrange8(p - static_cast<double>(base), w, derivative ? dw : nullptr);
  double s = 0.0;
  for (int j = 0; j < 8; ++j) {
    long i = base + j;
    if (i >= 0 && i < n) s += (derivative ? dw[j] : w[j]) * f[i];
  }
  return s;
}

struct LatticeKernel {
  double atom_weight = 0.0;
  double shift = 0.0;  // atom constraint: alpha_{n-1} index = 2 i_n - i_{n+1} + shift
  long kmin = 0;       // cont[idx] is the kernel at acceleration index k = kmin + idx
  std::vector<double> cont;
  std::vector<double> vac;
  bool truncated = false;
};

class ChainEvaluator {
 public:
  ChainEvaluator(const ChainSpec& spec, const TransitionKernelTable& table, const PhaseSpaceDensity& init,
                 int threads, bool want_vacuum)
      : spec_(spec), init_(init), m_(spec.grid.count), h_(spec.grid.step), nt_(thread_count(threads)) {
    check_spec(spec);
    const int n_slices = spec.lattice.n_slices();
    if (!(spec.state == init.state())) fail(ErrorKind::Coverage, "phase-space density was built for a different state");
    if (!same_lattice(spec.grid, init.alpha_grid()) || init.alpha_grid().lo != spec.grid.lo ||
        init.alpha_grid().count != spec.grid.count) {
      fail(ErrorKind::Coverage, "slice 0: phase-space alpha grid does not match the chain grid");
    }
    const Grid& v = init.v_grid();
    if (std::abs(v.step - h_) > 1e-12 * h_ || std::abs(v.lo / h_ - std::round(v.lo / h_)) > 1e-9) {
      fail(ErrorKind::Coverage, "slice 0: phase-space velocity grid is not on the chain lattice");
    }
    jlo_ = static_cast<long>(std::round(v.lo / h_));
    if (n_slices == 0) return;
    if (!(spec.potential == table.potential())) fail(ErrorKind::Coverage, "kernel table was built for a different potential");
    const Grid& a = table.alpha_grid();
    if (!same_lattice(spec.grid, a) || a.lo > spec.grid.lo + 1e-9 * h_ || a.hi() < spec.grid.hi() - 1e-9 * h_) {
      fail(ErrorKind::Coverage, "slice 1: alpha excursion outside the kernel table (table [" + format_double(a.lo) +
                                    ", " + format_double(a.hi()) + "], chain grid [" + format_double(spec.grid.lo) +
                                    ", " + format_double(spec.grid.hi()) + "])");
    }
    const long offset = std::lround((spec.grid.lo - a.lo) / h_);
    kernels_.resize(m_);
    std::vector<std::string> errors(m_);
#pragma omp parallel for schedule(dynamic) num_threads(nt_)
    for (std::size_t i = 0; i < m_; ++i) {
      try {
        kernels_[i] = make_kernel(table, table.column(static_cast<std::size_t>(offset) + i), want_vacuum);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
    for (auto& e : errors)
      if (!e.empty()) fail(ErrorKind::Coverage, "kernel lattice: " + e);
  }

  double p_init(std::size_t i0, std::size_t i1) const {
    long j = static_cast<long>(i1) - static_cast<long>(i0) - jlo_;
    if (j < 0 || j >= static_cast<long>(init_.v_grid().count)) return 0.0;
    return init_.value(i0, static_cast<std::size_t>(j));
  }

  // F_1[i0][i1]
  std::vector<double> initial() const {
    std::vector<double> f(m_ * m_);
    for (std::size_t i0 = 0; i0 < m_; ++i0)
      for (std::size_t i1 = 0; i1 < m_; ++i1) f[i0 * m_ + i1] = p_init(i0, i1);
    check_coverage(f, 1);
    return f;
  }

  // F_{n+1}[i_n][i_{n+1}] from F_n[i_{n-1}][i_n]; vacuum selects the vacuum kernel.
  std::vector<double> advance(const std::vector<double>& f, int slice, bool vacuum) const {
    std::vector<double> g(m_ * m_, 0.0);
#pragma omp parallel num_threads(nt_)
    {
      std::vector<double> col(m_);
#pragma omp for schedule(static)
      for (std::size_t in = 0; in < m_; ++in) {
        for (std::size_t p = 0; p < m_; ++p) col[p] = f[p * m_ + in];
        const LatticeKernel& k = kernels_[in];
        const std::vector<double>& cont = vacuum ? k.vac : k.cont;
        const long len = static_cast<long>(cont.size());
        for (std::size_t inext = 0; inext < m_; ++inext) {
          double acc = 0.0;
          if (k.atom_weight != 0.0) {
            double p0 = 2.0 * static_cast<double>(in) - static_cast<double>(inext) + k.shift;
            acc += k.atom_weight * (vacuum ? sample_column(col, p0, true) / h_ : sample_column(col, p0, false));
          }
          if (len > 0) {
            // k = inext - 2 in + p, idx = k - kmin
            const long base = static_cast<long>(inext) - 2 * static_cast<long>(in) - k.kmin;
            const long plo = std::max<long>(0, -base);
            const long phi = std::min<long>(static_cast<long>(m_) - 1, len - 1 - base);
            double s = 0.0;
            for (long p = plo; p <= phi; ++p) s += col[p] * cont[base + p];
            acc += h_ * s;
          }
          g[in * m_ + inext] = acc;
        }
      }
    }
    if (!vacuum) check_coverage(g, slice + 1);
    check_truncated(f, slice);
    return g;
  }

  // Joint density of (alpha_N, x).
  std::vector<double> endpoint_joint() const {
    auto f = initial();
    for (int n = 1; n <= spec_.lattice.n_slices(); ++n) f = advance(f, n, false);
    return f;
  }

  std::vector<double> density_from_joint(const std::vector<double>& f) const {
    std::vector<double> rho(m_, 0.0);
    for (std::size_t a = 0; a < m_; ++a)
      for (std::size_t x = 0; x < m_; ++x) rho[x] += f[a * m_ + x];
    for (auto& r : rho) r *= h_;
    return rho;
  }

  MeanVelocity mean_velocity() const {
    const int n_slices = spec_.lattice.n_slices();
    auto f = initial();
    for (int n = 1; n < n_slices; ++n) f = advance(f, n, false);
    auto joint = n_slices >= 1 ? advance(f, n_slices, false) : f;
    MeanVelocity mv;
    for (std::size_t a = 0; a < m_; ++a)
      for (std::size_t x = 0; x < m_; ++x) mv.classical += (spec_.grid.at(x) - spec_.grid.at(a)) * joint[a * m_ + x];
    mv.classical *= h_ * h_;
    if (n_slices >= 1) {
      auto vac = advance(f, n_slices, true);
      for (double v : vac) mv.vacuum += v;
      mv.vacuum *= h_ * h_;
    } else {
      // vacuum density is -d rho / dx, here -int dP_i/dv d alpha0
      std::vector<double> row(init_.v_grid().count);
      for (std::size_t i0 = 0; i0 < m_; ++i0) {
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = init_.value(i0, j);
        for (std::size_t j = 0; j < row.size(); ++j) mv.vacuum -= sample_column(row, static_cast<double>(j), true) / h_;
      }
      mv.vacuum *= h_ * h_;
    }
    mv.total = mv.classical + mv.vacuum;
    return mv;
  }

 private:
  LatticeKernel make_kernel(const TransitionKernelTable& table, const KernelColumn& col, bool want_vacuum) const {
    LatticeKernel k;
    const Potential& pot = spec_.potential;
    const double alpha = col.alpha;
    const double f = pot.force(alpha);
    switch (col.route) {
      case KernelRoute::AtomOnly:
        // atom at y = col.atom_location: acceleration a = f + y
        k.atom_weight = col.atom_weight;
        k.shift = (f + col.atom_location) / h_;
        break;
      case KernelRoute::TailSubtracted: {
        const Grid& u = table.y_grid();
        if (!same_lattice(Grid{0.0, h_, 1}, u)) {
          fail(ErrorKind::Coverage, "alpha=" + format_double(alpha) + ": noise grid is not on the chain lattice");
        }
        k.atom_weight = col.atom_weight;
        k.shift = 0.0;
        k.kmin = std::lround(u.lo / h_);
        k.cont = col.continuous;
        k.truncated = col.truncated;
        if (want_vacuum) k.vac = tail_subtracted_on_grid(pot, alpha, col.lambda, u, true);
        break;
      }
      case KernelRoute::Oscillatory: {
        const long kmax = 2 * static_cast<long>(m_ - 1);
        k.kmin = -kmax;
        k.cont.resize(2 * kmax + 1);
        if (want_vacuum) k.vac.resize(2 * kmax + 1);
        for (long kk = -kmax; kk <= kmax; ++kk) {
          double y = static_cast<double>(kk) * h_ - f;
          k.cont[kk + kmax] = kernel_value(pot, y, alpha).continuous;
          if (want_vacuum) k.vac[kk + kmax] = kernel_vacuum_value(pot, y, alpha);
        }
        break;
      }
    }
    return k;
  }

  // Mass of the slice-n marginal in the outer band of the grid must be negligible.
  void check_coverage(const std::vector<double>& f, int slice) const {
    const std::size_t band = std::max<std::size_t>(3, m_ / 50);
    std::vector<double> marg(m_, 0.0);
    for (std::size_t a = 0; a < m_; ++a)
      for (std::size_t b = 0; b < m_; ++b) marg[b] += std::abs(f[a * m_ + b]);
    double edge = 0.0;
    for (std::size_t b = 0; b < band; ++b) edge += marg[b] + marg[m_ - 1 - b];
    edge *= h_ * h_;
    if (edge > 1e-6) {
      fail(ErrorKind::Coverage, "slice " + std::to_string(slice) + ": alpha excursion reaches the grid edge (edge mass " +
                                    format_double(edge) + ")");
    }
  }

  // Columns that failed the table's grid checks may only carry negligible mass.
  void check_truncated(const std::vector<double>& f, int slice) const {
    double mass = 0.0;
    for (std::size_t in = 0; in < m_; ++in) {
      if (!kernels_[in].truncated) continue;
      for (std::size_t p = 0; p < m_; ++p) mass += std::abs(f[p * m_ + in]);
    }
    mass *= h_ * h_;
    if (mass > 1e-10) {
      fail(ErrorKind::Coverage, "slice " + std::to_string(slice) + ": mass " + format_double(mass) +
                                    " reaches kernel columns the chain lattice does not resolve");
    }
  }

  const ChainSpec& spec_;
  const PhaseSpaceDensity& init_;
  std::size_t m_;
  double h_;
  int nt_;
  long jlo_ = 0;
  std::vector<LatticeKernel> kernels_;
};

}  // namespace

AmplitudeField amplitude_path_sum(const ChainSpec& spec, EndpointPhase phase, int threads) {
  check_spec(spec);
  const std::size_t m = spec.grid.count;
  const double h = spec.grid.step;
  const int nt = thread_count(threads);
  // K(u) h with K(u) = e^{-i pi/4} (2 pi)^{-1/2} e^{i u^2 / 2}
  const cd pref = std::polar(h / std::sqrt(2.0 * M_PI), -M_PI / 4.0);
  std::vector<cd> kern(2 * m - 1);
  for (std::size_t d = 0; d < 2 * m - 1; ++d) {
    double u = (static_cast<double>(d) - static_cast<double>(m - 1)) * h;
    kern[d] = pref * std::polar(1.0, 0.5 * u * u);
  }
  std::vector<cd> vphase(m);
  for (std::size_t j = 0; j < m; ++j) vphase[j] = std::polar(1.0, -spec.potential.value(spec.grid.at(j)));

  std::vector<cd> psi(m), next(m);
  for (std::size_t j = 0; j < m; ++j) psi[j] = spec.state.amplitude(spec.grid.at(j));
  const int steps = spec.lattice.n_slices() + 1;
  for (int n = 1; n <= steps; ++n) {
    const bool apply_phase = n < steps || phase == EndpointPhase::Include;
#pragma omp parallel for schedule(static) num_threads(nt)
    for (std::size_t j = 0; j < m; ++j) {
      cd s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += kern[j + m - 1 - i] * psi[i];
      next[j] = apply_phase ? s * vphase[j] : s;
    }
    psi.swap(next);
  }
  AmplitudeField out;
  out.x = spec.grid;
  out.psi = psi;
  out.rho.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    out.rho[j] = std::norm(psi[j]);
    out.norm += out.rho[j] * h;
  }
  if (std::abs(out.norm - 1.0) > 1e-3) {
    fail(ErrorKind::DomainTooSmall, "path-sum norm " + format_double(out.norm) + " deviates from 1 by more than 1e-3");
  }
  return out;
}

double amplitude_mean_velocity(const ChainSpec& spec, int threads) {
  auto field = amplitude_path_sum(spec, EndpointPhase::Exclude, threads);
  static const double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  const long m = static_cast<long>(field.psi.size());
  auto at = [&](long i) { return (i >= 0 && i < m) ? field.psi[i] : cd(0.0); };
  double j = 0.0;
  for (long i = 0; i < m; ++i) {
    cd d = 0.0;
    for (int k = 1; k <= 4; ++k) d += c[k - 1] * (at(i + k) - at(i - k));
    j += (std::conj(field.psi[i]) * d).imag();
  }
  return j;  // (sum conj(psi) d psi / h) * h
}

TransitionKernelTable chain_kernel_table(const ChainSpec& spec, const KernelOptions& opt, int threads) {
  const double h = spec.grid.step;
  Grid y{0.0, h, 1};
  if (spec.potential.has_vanishing_tails()) {
    double wmin = 1e300;
    for (auto& b : spec.potential.bumps()) wmin = std::min(wmin, b.width);
    double u = spec.potential.max_slope() + 12.0 / wmin;
    y = Grid::aligned(-u, u, h);
  } else if (kernel_route(spec.potential, spec.grid.at(0)) == KernelRoute::Oscillatory ||
             spec.potential.grows_at_infinity()) {
    // oscillatory columns are evaluated directly by the chain; the table only carries routes
    y = Grid::aligned(-8.0 * h, 8.0 * h, h);
    std::vector<KernelColumn> cols;
    for (std::size_t i = 0; i < spec.grid.count; ++i) {
      KernelColumn c;
      c.alpha = spec.grid.at(i);
      c.route = kernel_route(spec.potential, c.alpha);
      c.reference = 0.0;
      if (c.route == KernelRoute::AtomOnly) {
        c.atom_weight = 1.0;
        c.pos_mass = 1.0;
      }
      cols.push_back(std::move(c));
    }
    return TransitionKernelTable(spec.potential, spec.grid, y, std::move(cols));
  }
  // columns far from the bumps alias on the chain lattice; the evaluator checks they stay empty
  KernelOptions lenient = opt;
  lenient.strict = false;
  return build_table(spec.potential, spec.grid, y, lenient, threads);
}

PhaseSpaceDensity chain_phase_density(const ChainSpec& spec, int threads) {
  const double h = spec.grid.step;
  const double r = spec.state.velocity_radius(1e-14);
  Grid v = Grid::aligned(spec.state.mean_velocity() - r, spec.state.mean_velocity() + r, h);
  return build_phase_density(spec.state, spec.grid, v, threads);
}

std::vector<double> chain_density(const ChainSpec& spec, const TransitionKernelTable& kernel,
                                  const PhaseSpaceDensity& init, int threads) {
  ChainEvaluator ev(spec, kernel, init, threads, false);
  return ev.density_from_joint(ev.endpoint_joint());
}

MeanVelocity mean_velocity_chain(const ChainSpec& spec, const TransitionKernelTable& kernel,
                                 const PhaseSpaceDensity& init, int threads) {
  ChainEvaluator ev(spec, kernel, init, threads, true);
  return ev.mean_velocity();
}

EquivalenceReport equivalence_report(const ChainSpec& spec, const TransitionKernelTable& kernel,
                                     const PhaseSpaceDensity& init, int threads) {
  EquivalenceReport r;
  r.n_slices = spec.lattice.n_slices();
  r.x = spec.grid;
  auto t0 = std::chrono::steady_clock::now();
  try {
    r.chain = chain_density(spec, kernel, init, threads);
    r.pathsum = amplitude_path_sum(spec, EndpointPhase::Include, threads).rho;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < r.chain.size(); ++i) {
      double d = std::abs(r.chain[i] - r.pathsum[i]);
      num += d;
      den += std::abs(r.pathsum[i]);
      r.linf = std::max(r.linf, d);
    }
    r.l1 = num / den;
  } catch (const Error& e) {
    r.status = std::string(to_string(e.kind())) + ": " + e.what();
    r.error = e.kind();
    r.l1 = r.linf = std::nan("");
  }
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Grid default_chain_grid(const InitialState& state, const Potential& pot, int n_slices) {
  const double t = n_slices + 1.0;
  const double s = state.sigma();
  const double spread = s * std::sqrt(1.0 + t * t / (4.0 * s * s * s * s));
  // two-packet states spread around each packet
  double half = 8.5 * spread + std::abs(state.mean_velocity()) * t + 0.5 * state.separation() + 2.0;
  if (pot.has_vanishing_tails()) half += pot.max_slope() * t;
  // keep 2 pi / h above the grid width so the Fresnel kernel does not alias
  const double h = std::min({0.1, s / 10.0, 0.75 * M_PI / half});
  return Grid::aligned(state.mean_position() - half, state.mean_position() + half, h);
}

}  // namespace qprob
