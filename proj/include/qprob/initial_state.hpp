#pragma once

#include <complex>
#include <string>
#include <string_view>

namespace qprob {

// Initial wave data Psi0 = sqrt(P0) exp(i phi), lattice units.
class InitialState {
 public:
  enum class Kind { GaussianPacket, TwoPacketSuperposition };

  InitialState() = default;

  // |Psi0|^2 is a normal density with standard deviation sigma; phase k0*x.
  static InitialState gaussian(double sigma, double center, double wavenumber);
  // g(x + d/2) + e^{i theta} g(x - d/2), normalized.
  static InitialState two_packet(double sigma, double separation, double relative_phase);

  // gaussian:sigma=,x0=,k0= | twopacket:sigma=,d=,theta=
  static InitialState parse(std::string_view spec);
  std::string spec() const;

  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double center() const { return center_; }
  double wavenumber() const { return wavenumber_; }
  double separation() const { return separation_; }
  double relative_phase() const { return relative_phase_; }

  std::complex<double> amplitude(double x) const;
  double density(double x) const { return std::norm(amplitude(x)); }
  double phase(double x) const { return std::arg(amplitude(x)); }

  double mean_position() const { return center_; }
  double mean_velocity() const { return kind_ == Kind::GaussianPacket ? wavenumber_ : 0.0; }

  // P0(x) < tol whenever |x - center| > support_radius(tol).
  double support_radius(double tol) const;
  // |P_i(alpha, v)| < tol whenever |v - mean_velocity| > velocity_radius(tol).
  double velocity_radius(double tol) const;

  friend bool operator==(const InitialState&, const InitialState&) = default;

 private:
  Kind kind_ = Kind::GaussianPacket;
  double sigma_ = 1.0;
  double center_ = 0.0;
  double wavenumber_ = 0.0;
  double separation_ = 0.0;
  double relative_phase_ = 0.0;
  double norm_ = 1.0;
};

}  // namespace qprob
