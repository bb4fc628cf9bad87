#include "qprob/potential.hpp"

#include <cmath>
#include <map>

#include "qprob/error.hpp"
#include "qprob/format.hpp"

namespace qprob {

namespace {

void check_finite(double v, const char* name) {
  if (!std::isfinite(v)) fail(ErrorKind::InvalidParameter, std::string(name) + " must be finite");
}

double bump_value(const Bump& b, double x) {
  double z = (x - b.center) / b.width;
  return b.height * std::exp(-0.5 * z * z);
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double require(const std::map<std::string, double>& kv, const std::string& key, std::string_view spec) {
  auto it = kv.find(key);
  if (it == kv.end()) fail(ErrorKind::Parse, "missing '" + key + "' in '" + std::string(spec) + "'");
  return it->second;
}

void only_keys(const std::map<std::string, double>& kv, std::initializer_list<const char*> keys,
               std::string_view spec) {
  for (auto& [k, v] : kv) {
    bool ok = false;
    for (auto* name : keys) ok = ok || k == name;
    if (!ok) fail(ErrorKind::Parse, "unknown key '" + k + "' in '" + std::string(spec) + "'");
  }
}

}  // namespace

Potential Potential::free() { return Potential{}; }

Potential Potential::harmonic(double stiffness) {
  check_finite(stiffness, "harmonic stiffness");
  Potential p;
  p.family_ = Family::Harmonic;
  p.coefficients_ = {0.0, 0.0, 0.5 * stiffness};
  return p;
}

Potential Potential::quartic(double coefficient) {
  check_finite(coefficient, "quartic coefficient");
  Potential p;
  p.family_ = Family::Quartic;
  p.coefficients_ = {0.0, 0.0, 0.0, 0.0, coefficient};
  return p;
}

Potential Potential::polynomial(std::vector<double> coefficients) {
  for (double c : coefficients) check_finite(c, "polynomial coefficient");
  while (!coefficients.empty() && coefficients.back() == 0.0) coefficients.pop_back();
  Potential p;
  p.family_ = Family::Polynomial;
  p.coefficients_ = std::move(coefficients);
  if (p.coefficients_.empty()) p.coefficients_ = {0.0};
  return p;
}

Potential Potential::gaussian_bump(double height, double width, double center) {
  Potential p = sum_of_bumps({Bump{height, width, center}});
  p.family_ = Family::GaussianBump;
  return p;
}

Potential Potential::sum_of_bumps(std::vector<Bump> bumps) {
  if (bumps.empty()) fail(ErrorKind::InvalidParameter, "sum of bumps needs at least one bump");
  for (auto& b : bumps) {
    check_finite(b.height, "bump height");
    check_finite(b.center, "bump center");
    if (!(b.width > 0.0) || !std::isfinite(b.width)) fail(ErrorKind::InvalidParameter, "bump width must be positive");
  }
  Potential p;
  p.family_ = bumps.size() == 1 ? Family::GaussianBump : Family::SumOfGaussianBumps;
  p.bumps_ = std::move(bumps);
  return p;
}

Potential Potential::parse(std::string_view spec) {
  spec = trim(spec);
  auto colon = spec.find(':');
  std::string_view name = trim(spec.substr(0, colon));
  std::string_view args = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (name == "free") {
    if (!trim(args).empty()) fail(ErrorKind::Parse, "'free' takes no parameters");
    return free();
  }
  if (name == "harmonic") {
    auto kv = parse_named_values(args, spec);
    only_keys(kv, {"k"}, spec);
    return harmonic(require(kv, "k", spec));
  }
  if (name == "quartic") {
    auto kv = parse_named_values(args, spec);
    only_keys(kv, {"c"}, spec);
    return quartic(require(kv, "c", spec));
  }
  if (name == "poly") {
    std::vector<double> c;
    for (auto& part : split(args, ',')) c.push_back(parse_double(part, "poly coefficient"));
    if (c.empty()) fail(ErrorKind::Parse, "poly needs at least one coefficient");
    return polynomial(std::move(c));
  }
  if (name == "gauss") {
    std::vector<Bump> bumps;
    for (auto& group : split(args, ';')) {
      auto kv = parse_named_values(group, spec);
      only_keys(kv, {"h", "w", "x0"}, spec);
      bumps.push_back(Bump{require(kv, "h", spec), require(kv, "w", spec), require(kv, "x0", spec)});
    }
    return sum_of_bumps(std::move(bumps));
  }
  fail(ErrorKind::Parse, "unknown potential '" + std::string(spec) + "'");
}

std::string Potential::spec() const {
  switch (family_) {
    case Family::Free: return "free";
    case Family::Harmonic: return "harmonic:k=" + format_double(2.0 * coefficients_[2]);
    case Family::Quartic: return "quartic:c=" + format_double(coefficients_[4]);
    case Family::Polynomial: {
      std::string s = "poly:";
      for (std::size_t i = 0; i < coefficients_.size(); ++i) {
        if (i) s += ',';
        s += format_double(coefficients_[i]);
      }
      return s;
    }
    case Family::GaussianBump:
    case Family::SumOfGaussianBumps: {
      std::string s = "gauss:";
      for (std::size_t i = 0; i < bumps_.size(); ++i) {
        if (i) s += ';';
        s += "h=" + format_double(bumps_[i].height) + ",w=" + format_double(bumps_[i].width) +
             ",x0=" + format_double(bumps_[i].center);
      }
      return s;
    }
  }
  return "free";
}

double Potential::value(double x) const {
  if (has_vanishing_tails()) {
    double v = 0.0;
    for (auto& b : bumps_) v += bump_value(b, x);
    return v;
  }
  double v = 0.0;
  for (std::size_t k = coefficients_.size(); k-- > 0;) v = v * x + coefficients_[k];
  return v;
}

double Potential::force(double x) const {
  if (has_vanishing_tails()) {
    double f = 0.0;
    for (auto& b : bumps_) f += bump_value(b, x) * (x - b.center) / (b.width * b.width);
    return f;
  }
  if (family_ == Family::Quartic) return -4.0 * coefficients_[4] * x * x * x;
  if (family_ == Family::Harmonic) return -2.0 * coefficients_[2] * x;
  double d = 0.0;
  for (std::size_t k = coefficients_.size(); k-- > 1;) d = d * x + static_cast<double>(k) * coefficients_[k];
  return -d;
}

double Potential::difference(double alpha, double beta) const {
  return value(alpha + 0.5 * beta) - value(alpha - 0.5 * beta);
}

double Potential::odd_phase(double alpha, double beta) const {
  switch (family_) {
    case Family::Free:
    case Family::Harmonic:
      return 0.0;
    case Family::Quartic:
      return coefficients_[4] * alpha * beta * beta * beta;
    case Family::Polynomial: {
      auto e = odd_phase_coefficients(alpha);
      double b2 = beta * beta;
      double g = 0.0;
      for (std::size_t j = e.size(); j-- > 3;) {
        if (j % 2 == 1) g = g * b2 + e[j];
      }
      return g * beta * b2;
    }
    default:
      return difference(alpha, beta) + force(alpha) * beta;
  }
}

bool Potential::grows_at_infinity() const {
  if (has_vanishing_tails()) return false;
  return coefficients_.size() >= 3;
}

std::vector<double> Potential::odd_phase_coefficients(double alpha) const {
  if (has_vanishing_tails()) fail(ErrorKind::NotApplicable, "odd-phase coefficients need a polynomial potential");
  const int n = static_cast<int>(coefficients_.size()) - 1;
  std::vector<double> e(std::max(n + 1, 0), 0.0);
  if (family_ == Family::Quartic) {
    e[3] = coefficients_[4] * alpha;
    return e;
  }
  for (int j = 3; j <= n; j += 2) {
    double s = 0.0;
    for (int k = n; k >= j; --k) s = s * alpha + coefficients_[k] * binomial(k, j);
    e[j] = s / std::ldexp(1.0, j - 1);
  }
  return e;
}

double Potential::max_slope() const {
  double s = 0.0;
  // max |d/dx h exp(-z^2/2)| = |h| / (w sqrt(e))
  for (auto& b : bumps_) s += std::abs(b.height) / (b.width * std::sqrt(M_E));
  return s;
}

}  // namespace qprob
