#pragma once

#include <vector>

#include "qprob/grid.hpp"
#include "qprob/initial_state.hpp"
#include "qprob/quadrature.hpp"
#include "qprob/rng.hpp"

namespace qprob {

// P_i(alpha, v) = (1/pi) int_0^inf Re[e^{-i v b} Psi0(alpha + b/2) conj(Psi0(alpha - b/2))] db
double initial_density(const InitialState& state, double alpha, double v, const QuadratureOptions& opt = {});

// P_i on the product grid (row-major, alpha major) by a spectrally accurate trapezoid sum.
std::vector<double> tabulate_phase_density(const InitialState& state, const Grid& alpha_grid, const Grid& v_grid,
                                           int threads = 0);

class PhaseSpaceDensity {
 public:
  PhaseSpaceDensity() = default;
  PhaseSpaceDensity(InitialState state, Grid alpha_grid, Grid v_grid, std::vector<double> values);

  const InitialState& state() const { return state_; }
  const Grid& alpha_grid() const { return alpha_grid_; }
  const Grid& v_grid() const { return v_grid_; }
  const std::vector<double>& values() const { return values_; }
  double value(std::size_t i, std::size_t j) const { return values_[i * v_grid_.count + j]; }

  double pos_mass() const { return pos_mass_; }
  double neg_mass() const { return neg_mass_; }
  double total_mass() const { return pos_mass_ + neg_mass_; }
  // max_i |sum_j P_ij dv - P0(alpha_i)|
  double marginal_error() const { return marginal_error_; }
  // |p+ - p- - 1|
  double normalization_error() const { return std::abs(pos_mass_ - neg_mass_ - 1.0); }

  const std::vector<double>& cumulative() const { return cumulative_; }

 private:
  InitialState state_;
  Grid alpha_grid_;
  Grid v_grid_;
  std::vector<double> values_;
  std::vector<double> cumulative_;
  double pos_mass_ = 0.0;
  double neg_mass_ = 0.0;
  double marginal_error_ = 0.0;
};

PhaseSpaceDensity build_phase_density(const InitialState& state, const Grid& alpha_grid, const Grid& v_grid,
                                      int threads = 0);

struct InitialDraw {
  double alpha0 = 0.0;
  double v0 = 0.0;
  int sign = 1;
  double mass = 1.0;
};

// Draws a cell from |P_i| and a uniform point inside it.
InitialDraw sample_initial(const PhaseSpaceDensity& density, Rng& rng);

// Grids that cover the state to the build tolerances with the given resolution.
Grid default_init_alpha_grid(const InitialState& state);
Grid default_init_v_grid(const InitialState& state);

}  // namespace qprob
