#include "qprob/initial_state.hpp"

#include <cmath>

#include "qprob/error.hpp"
#include "qprob/format.hpp"

namespace qprob {

namespace {

double require(const std::map<std::string, double>& kv, const char* key, std::string_view spec) {
  auto it = kv.find(key);
  if (it == kv.end()) fail(ErrorKind::Parse, std::string("missing '") + key + "' in '" + std::string(spec) + "'");
  return it->second;
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(ErrorKind::InvalidParameter, "sigma must be positive");
}

}  // namespace

InitialState InitialState::gaussian(double sigma, double center, double wavenumber) {
  check_sigma(sigma);
  if (!std::isfinite(center) || !std::isfinite(wavenumber)) fail(ErrorKind::InvalidParameter, "x0 and k0 must be finite");
  InitialState s;
  s.kind_ = Kind::GaussianPacket;
  s.sigma_ = sigma;
  s.center_ = center;
  s.wavenumber_ = wavenumber;
  return s;
}

InitialState InitialState::two_packet(double sigma, double separation, double relative_phase) {
  check_sigma(sigma);
  if (!std::isfinite(separation) || !std::isfinite(relative_phase)) fail(ErrorKind::InvalidParameter, "d and theta must be finite");
  double overlap = std::exp(-separation * separation / (8.0 * sigma * sigma));
  double n2 = 2.0 * (1.0 + std::cos(relative_phase) * overlap);
  if (!(n2 > 1e-12)) fail(ErrorKind::InvalidParameter, "two-packet superposition cancels to zero");
  InitialState s;
  s.kind_ = Kind::TwoPacketSuperposition;
  s.sigma_ = sigma;
  s.separation_ = separation;
  s.relative_phase_ = relative_phase;
  s.norm_ = 1.0 / std::sqrt(n2);
  return s;
}

InitialState InitialState::parse(std::string_view spec) {
  spec = trim(spec);
  auto colon = spec.find(':');
  std::string_view name = trim(spec.substr(0, colon));
  std::string_view args = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  auto kv = parse_named_values(args, spec);
  if (name == "gaussian") {
    for (auto& [k, v] : kv)
      if (k != "sigma" && k != "x0" && k != "k0") fail(ErrorKind::Parse, "unknown key '" + k + "' in '" + std::string(spec) + "'");
    return gaussian(require(kv, "sigma", spec), require(kv, "x0", spec), require(kv, "k0", spec));
  }
  if (name == "twopacket") {
    for (auto& [k, v] : kv)
      if (k != "sigma" && k != "d" && k != "theta") fail(ErrorKind::Parse, "unknown key '" + k + "' in '" + std::string(spec) + "'");
    return two_packet(require(kv, "sigma", spec), require(kv, "d", spec), require(kv, "theta", spec));
  }
  fail(ErrorKind::Parse, "unknown state '" + std::string(spec) + "'");
}

std::string InitialState::spec() const {
  if (kind_ == Kind::GaussianPacket) {
    return "gaussian:sigma=" + format_double(sigma_) + ",x0=" + format_double(center_) +
           ",k0=" + format_double(wavenumber_);
  }
  return "twopacket:sigma=" + format_double(sigma_) + ",d=" + format_double(separation_) +
         ",theta=" + format_double(relative_phase_);
}

std::complex<double> InitialState::amplitude(double x) const {
  const double a = std::pow(2.0 * M_PI * sigma_ * sigma_, -0.25);
  const double q = 1.0 / (4.0 * sigma_ * sigma_);
  if (kind_ == Kind::GaussianPacket) {
    double z = x - center_;
    return std::polar(a * std::exp(-q * z * z), wavenumber_ * x);
  }
  double zl = x + 0.5 * separation_;
  double zr = x - 0.5 * separation_;
  return norm_ * (a * std::exp(-q * zl * zl) + std::polar(a * std::exp(-q * zr * zr), relative_phase_));
}

double InitialState::support_radius(double tol) const {
  // |Psi0|^2 <= peak * exp(-z^2 / (2 sigma^2)) around each packet
  double peak = 1.0 / (std::sqrt(2.0 * M_PI) * sigma_);
  double offset = 0.0;
  if (kind_ == Kind::TwoPacketSuperposition) {
    peak *= 4.0 * norm_ * norm_;
    offset = 0.5 * std::abs(separation_);
  }
  double l = std::log(peak / tol);
  return offset + (l > 0.0 ? sigma_ * std::sqrt(2.0 * l) : 0.0);
}

double InitialState::velocity_radius(double tol) const {
  // |P_i| <= c/pi * exp(-2 sigma^2 (v - k0)^2)
  double c = kind_ == Kind::TwoPacketSuperposition ? 4.0 * norm_ * norm_ : 1.0;
  double l = std::log(c / (M_PI * tol));
  return l > 0.0 ? std::sqrt(l / 2.0) / sigma_ : 0.0;
}

}  // namespace qprob
