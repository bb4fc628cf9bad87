#pragma once

#include <complex>
#include <vector>

#include "qprob/grid.hpp"
#include "qprob/initial_state.hpp"
#include "qprob/potential.hpp"

namespace qprob {

struct Wavefield {
  Grid x;
  std::vector<std::complex<double>> psi;
  double time = 0.0;

  double norm() const;
  std::vector<double> density() const;
  double mean_position() const;
  double width() const;  // standard deviation of |psi|^2
};

struct PropagationOptions {
  std::size_t snapshots = 1;   // evenly spaced snapshots after t = 0 (the last one at total_time)
  double leak_tol = 1e-6;      // mass allowed in the boundary bands
  bool check_resolution = true;
};

// Crank-Nicolson for i dpsi/dt = -1/2 psi'' + V psi with psi = 0 outside the grid.
// Returns the initial field followed by the requested snapshots.
std::vector<Wavefield> propagate(const InitialState& state, const Potential& pot, double total_time, std::size_t steps,
                                 const Grid& grid, const PropagationOptions& opt = {});

// Same, starting from an arbitrary field.
std::vector<Wavefield> propagate_field(const Wavefield& start, const Potential& pot, double total_time,
                                       std::size_t steps, const PropagationOptions& opt = {});

// Im sum conj(psi) dpsi/dx dx with sixth-order centered differences.
double mean_momentum(const Wavefield& field);

// Lowest eigenvector of the discretized Hamiltonian (inverse iteration), unit norm.
Wavefield ground_state(const Potential& pot, const Grid& grid);

// Reference density averaged over each histogram bin (Simpson sub-sampling of the linear interpolant).
std::vector<double> bin_average(const Grid& x, const std::vector<double>& rho, double lo, double hi, std::size_t count);

// Domain and resolution that satisfy the propagate() preconditions for a scenario.
struct ReferencePlan {
  Grid grid;
  std::size_t steps = 0;
};
ReferencePlan default_reference_plan(const InitialState& state, const Potential& pot, double total_time);

}  // namespace qprob
