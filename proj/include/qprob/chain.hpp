#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "qprob/error.hpp"
#include "qprob/grid.hpp"
#include "qprob/initial_state.hpp"
#include "qprob/kernel.hpp"
#include "qprob/lattice.hpp"
#include "qprob/phase_init.hpp"
#include "qprob/potential.hpp"

namespace qprob {

// Dense small-N evaluation. One uniform grid serves as the integration grid of every
// alpha_0..alpha_N and as the output grid of the endpoint x = alpha_{N+1}.
struct ChainSpec {
  LatticeConfig lattice;
  Potential potential;
  InitialState state;
  Grid grid;
  int cap = 4;
};

enum class EndpointPhase { Include, Exclude };

struct AmplitudeField {
  Grid x;
  std::vector<std::complex<double>> psi;
  std::vector<double> rho;
  double norm = 0.0;
};

// Psi_N(x) = int prod_n K(x_n - x_{n-1}) e^{-i V(x_n)} Psi0(x_0), K(u) = (2 pi i)^{-1/2} e^{i u^2/2}.
// With EndpointPhase::Exclude the potential phase of the endpoint slice is left out, which does
// not change rho but gives the velocity field the chain's mean velocity refers to.
AmplitudeField amplitude_path_sum(const ChainSpec& spec, EndpointPhase phase = EndpointPhase::Include,
                                  int threads = 0);

// Im int conj(Psi) dPsi/dx dx of the endpoint field before its potential phase.
double amplitude_mean_velocity(const ChainSpec& spec, int threads = 0);

// Kernel table and phase-space density aligned with the chain lattice.
TransitionKernelTable chain_kernel_table(const ChainSpec& spec, const KernelOptions& opt = {}, int threads = 0);
PhaseSpaceDensity chain_phase_density(const ChainSpec& spec, int threads = 0);

// rho_N on spec.grid from the signed probability chain. TailSubtracted and AtomOnly columns are
// read from the table; oscillatory kernels are evaluated directly at the lattice noise values.
std::vector<double> chain_density(const ChainSpec& spec, const TransitionKernelTable& kernel,
                                  const PhaseSpaceDensity& init, int threads = 0);

struct MeanVelocity {
  double classical = 0.0;
  double vacuum = 0.0;
  double total = 0.0;
};

MeanVelocity mean_velocity_chain(const ChainSpec& spec, const TransitionKernelTable& kernel,
                                 const PhaseSpaceDensity& init, int threads = 0);

struct EquivalenceReport {
  double l1 = 0.0;    // sum |chain - pathsum| / sum |pathsum|
  double linf = 0.0;  // max |chain - pathsum|
  int n_slices = 0;
  double runtime_ms = 0.0;
  std::string status = "ok";
  std::optional<ErrorKind> error;  // kind of the failure recorded in status
  Grid x;
  std::vector<double> chain;
  std::vector<double> pathsum;
};

EquivalenceReport equivalence_report(const ChainSpec& spec, const TransitionKernelTable& kernel,
                                     const PhaseSpaceDensity& init, int threads = 0);

Grid default_chain_grid(const InitialState& state, const Potential& pot, int n_slices);

}  // namespace qprob
