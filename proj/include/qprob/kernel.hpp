#pragma once

#include <cstdint>
#include <vector>

#include "qprob/grid.hpp"
#include "qprob/potential.hpp"
#include "qprob/quadrature.hpp"
#include "qprob/rng.hpp"

namespace qprob {

// How the kernel Pi(y, alpha) = (1/pi) int_0^inf cos(y b + g(alpha, b)) db is evaluated.
//   AtomOnly:       g == 0, Pi = delta(y).
//   TailSubtracted: vanishing-tail potentials, Pi = delta(y + f) + continuous part.
//   Oscillatory:    polynomial g, atom-free Airy-type kernel via a rotated contour.
enum class KernelRoute { AtomOnly, TailSubtracted, Oscillatory };

const char* to_string(KernelRoute route);

KernelRoute kernel_route(const Potential& pot, double alpha);

// Location the tabulated noise grid is measured from: -f(alpha) for TailSubtracted, else 0.
double reference_location(const Potential& pot, double alpha);

// Noise scale of an oscillatory column (inverse of the leading-term scale of g), 0 otherwise.
double kernel_width(const Potential& pot, double alpha);

// Smallest multiple of 2 pi beyond which |V(alpha+b/2)| + |V(alpha-b/2)| < tail_tol.
// Throws NotApplicable for potentials that grow at infinity.
double effective_range(const Potential& pot, double alpha, double tail_tol);

struct KernelOptions {
  double tail_tol = 1e-12;
  // When false, columns failing the grid checks are kept and flagged instead of raising.
  bool strict = true;
  QuadratureOptions quad{};
};

struct KernelValue {
  double continuous = 0.0;
  double atom_location = 0.0;
  double atom_weight = 0.0;
  double error = 0.0;
};

KernelValue kernel_value(const Potential& pot, double y, double alpha, const KernelOptions& opt = {});

// Continuous part of (1/pi) int_0^inf b sin(y b + g) db, i.e. of -d/dy Pi. The atom part is
// -delta'(y - atom_location) with the atom weight of kernel_value.
double kernel_vacuum_value(const Potential& pot, double y, double alpha,
                           const KernelOptions& opt = {});

// Signed cumulative distribution int_{-inf}^{y} Pi (Oscillatory route only).
double kernel_cdf(const Potential& pot, double y, double alpha, const KernelOptions& opt = {});

// Continuous part c(u) of a TailSubtracted column at u = y + f(alpha) on a uniform grid, by a
// spectrally accurate trapezoid sum over [0, lambda]. With vacuum = true returns the continuous
// part of the vacuum kernel instead.
std::vector<double> tail_subtracted_on_grid(const Potential& pot, double alpha, double lambda,
                                            const Grid& u, bool vacuum = false);

struct KernelColumn {
  double alpha = 0.0;
  KernelRoute route = KernelRoute::AtomOnly;
  bool unresolved = false;  // Oscillatory column narrower than the grid, collapsed to an atom
  bool truncated = false;   // failed the grid checks in a non-strict build
  double reference = 0.0;
  double atom_location = 0.0;
  double atom_weight = 0.0;
  Grid y_grid;                     // absolute noise values (empty for atom-only columns)
  std::vector<double> continuous;  // Pi_cont at y_grid nodes
  std::vector<double> weights;     // quadrature weights of the nodes
  std::vector<double> mass;        // signed mass carried by each node
  double tail_lo = 0.0;            // signed mass below y_grid.lo, lumped at the edge
  double tail_hi = 0.0;            // signed mass above y_grid.hi(), lumped at the edge
  double pos_mass = 0.0;           // atom + positive parts
  double neg_mass = 0.0;
  double lambda = 0.0;             // NaN when not applicable
  double normalization_error = 0.0;

  // sampler: cumulative |mass| over items (atom, cells, tail lumps)
  std::vector<double> cumulative;
  std::vector<std::int32_t> items;

  double total_mass() const { return pos_mass + neg_mass; }
  // Signed mass of the continuous part on the grid (excluding lumps).
  double continuous_integral() const;
};

struct NoiseDraw {
  double y = 0.0;
  int sign = 1;
  double mass = 1.0;
  bool atom = true;
};

// y_grid is relative to reference_location(pot, alpha).
KernelColumn decompose_column(const Potential& pot, double alpha, const Grid& y_grid,
                              const KernelOptions& opt = {});

NoiseDraw sample_noise(const KernelColumn& column, Rng& rng);

class TransitionKernelTable {
 public:
  TransitionKernelTable() = default;
  TransitionKernelTable(Potential pot, Grid alpha_grid, Grid y_grid, std::vector<KernelColumn> columns);

  const Potential& potential() const { return pot_; }
  const Grid& alpha_grid() const { return alpha_grid_; }
  const Grid& y_grid() const { return y_grid_; }  // relative noise grid
  const std::vector<KernelColumn>& columns() const { return columns_; }
  const KernelColumn& column(std::size_t i) const { return columns_.at(i); }
  bool all_atom_only() const { return all_atom_only_; }

  bool contains(double alpha) const { return alpha_grid_.contains(alpha); }
  // Interpolates columns linearly in alpha by choosing column i or i+1 at random with the
  // linear weights. Requires contains(alpha).
  NoiseDraw sample(double alpha, Rng& rng) const;

  static constexpr const char* interpolation = "linear-mixture";

 private:
  Potential pot_;
  Grid alpha_grid_;
  Grid y_grid_;
  std::vector<KernelColumn> columns_;
  bool all_atom_only_ = true;
};

// Builds columns in parallel over alpha (OpenMP, `threads` workers, 0 = runtime default).
TransitionKernelTable build_table(const Potential& pot, const Grid& alpha_grid, const Grid& y_grid,
                                  const KernelOptions& opt = {}, int threads = 0);
// Serial reference for tests and benchmarks.
TransitionKernelTable build_table_serial(const Potential& pot, const Grid& alpha_grid,
                                         const Grid& y_grid, const KernelOptions& opt = {});

}  // namespace qprob
