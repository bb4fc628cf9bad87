#include "qprob/lattice.hpp"

#include <cmath>

#include "qprob/error.hpp"

namespace qprob {

LatticeConfig::LatticeConfig(int n_slices, double epsilon, double mass, double hbar)
    : n_slices_(n_slices), epsilon_(epsilon), mass_(mass), hbar_(hbar) {
  if (n_slices < 0) fail(ErrorKind::InvalidParameter, "n_slices must be >= 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail(ErrorKind::InvalidParameter, "epsilon must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) fail(ErrorKind::InvalidParameter, "mass must be positive");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) fail(ErrorKind::InvalidParameter, "hbar must be positive");
  length_unit_ = std::sqrt(hbar * epsilon / mass);
  energy_unit_ = hbar / epsilon;
  if (!(length_unit_ > 0.0) || !(energy_unit_ > 0.0) || !std::isfinite(length_unit_) ||
      !std::isfinite(energy_unit_)) {
    fail(ErrorKind::InvalidParameter, "derived units are not finite and positive");
  }
}

LatticeConfig make_lattice(int n_slices, double epsilon, double mass, double hbar) {
  return LatticeConfig(n_slices, epsilon, mass, hbar);
}

}  // namespace qprob
