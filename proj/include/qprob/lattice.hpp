#pragma once

namespace qprob {

// Time slicing of duration epsilon and the lattice unit system in which m = hbar = epsilon = 1.
class LatticeConfig {
 public:
  LatticeConfig() = default;
  LatticeConfig(int n_slices, double epsilon, double mass, double hbar);

  int n_slices() const { return n_slices_; }
  double epsilon() const { return epsilon_; }
  double mass() const { return mass_; }
  double hbar() const { return hbar_; }

  double length_unit() const { return length_unit_; }
  double energy_unit() const { return energy_unit_; }
  double time_unit() const { return epsilon_; }
  // Final time of the endpoint slice N+1, in lattice units.
  double final_time() const { return static_cast<double>(n_slices_ + 1); }

  double to_lattice_position(double x) const { return x / length_unit_; }
  double from_lattice_position(double x) const { return x * length_unit_; }
  double to_lattice_time(double t) const { return t / epsilon_; }
  double from_lattice_time(double t) const { return t * epsilon_; }
  double to_lattice_energy(double e) const { return e / energy_unit_; }
  double from_lattice_energy(double e) const { return e * energy_unit_; }

 private:
  int n_slices_ = 0;
  double epsilon_ = 1.0;
  double mass_ = 1.0;
  double hbar_ = 1.0;
  double length_unit_ = 1.0;
  double energy_unit_ = 1.0;
};

LatticeConfig make_lattice(int n_slices, double epsilon, double mass, double hbar);

}  // namespace qprob
