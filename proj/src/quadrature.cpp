#include "qprob/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qprob {

namespace detail {

const Gk15& gk15() {
  static const Gk15 rule = [] {
    Gk15 r{};
    auto& xk = boost::math::quadrature::gauss_kronrod<double, 15>::abscissa();
    auto& wk = boost::math::quadrature::gauss_kronrod<double, 15>::weights();
    auto& wg = boost::math::quadrature::gauss<double, 7>::weights();
    for (int i = 0; i < 8; ++i) {
      r.x[i] = xk[i];
      r.wk[i] = wk[i];
    }
    for (int i = 0; i < 4; ++i) r.wg[i] = wg[i];
    return r;
  }();
  return rule;
}

}  // namespace detail

std::vector<double> gregory_weights(std::size_t count, double step) {
  std::vector<double> w(count, step);
  if (count >= 8) {
    static const double c[4] = {17.0 / 48, 59.0 / 48, 43.0 / 48, 49.0 / 48};
    for (int i = 0; i < 4; ++i) {
      w[i] = c[i] * step;
      w[count - 1 - i] = c[i] * step;
    }
  } else if (count >= 2) {
    w.front() = w.back() = 0.5 * step;
  }
  return w;
}

}  // namespace qprob
