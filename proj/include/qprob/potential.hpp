#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace qprob {

struct Bump {
  double height = 0.0;
  double width = 1.0;
  double center = 0.0;
  friend bool operator==(const Bump&, const Bump&) = default;
};

// Analytic potential in lattice units.
class Potential {
 public:
  enum class Family { Free, Harmonic, Quartic, Polynomial, GaussianBump, SumOfGaussianBumps };

  Potential() = default;

  static Potential free();
  static Potential harmonic(double stiffness);
  static Potential quartic(double coefficient);
  // coefficients[k] multiplies x^k
  static Potential polynomial(std::vector<double> coefficients);
  static Potential gaussian_bump(double height, double width, double center);
  static Potential sum_of_bumps(std::vector<Bump> bumps);

  // free | harmonic:k= | quartic:c= | poly:c0,c1,... | gauss:h=,w=,x0=[;h=,w=,x0=...]
  static Potential parse(std::string_view spec);
  std::string spec() const;

  Family family() const { return family_; }
  double value(double x) const;
  double force(double x) const;

  // g(alpha, beta) = V(alpha+beta/2) - V(alpha-beta/2) + f(alpha)*beta
  double odd_phase(double alpha, double beta) const;
  // V(alpha+beta/2) - V(alpha-beta/2), evaluated directly.
  double difference(double alpha, double beta) const;

  bool is_polynomial() const { return !coefficients_.empty() || family_ == Family::Free; }
  bool has_vanishing_tails() const {
    return family_ == Family::GaussianBump || family_ == Family::SumOfGaussianBumps;
  }
  // Polynomial of degree >= 2 (the effective range is not defined).
  bool grows_at_infinity() const;

  const std::vector<double>& coefficients() const { return coefficients_; }
  const std::vector<Bump>& bumps() const { return bumps_; }

  // Taylor coefficients of g in beta at fixed alpha: result[j] multiplies beta^j (odd j >= 3 only).
  std::vector<double> odd_phase_coefficients(double alpha) const;

  // Bound on |dV/dx| over the real line (vanishing-tail families only).
  double max_slope() const;

  friend bool operator==(const Potential&, const Potential&) = default;

 private:
  Family family_ = Family::Free;
  std::vector<double> coefficients_;
  std::vector<Bump> bumps_;
};

}  // namespace qprob
