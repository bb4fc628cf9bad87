#include "qprob/grid.hpp"

#include <cmath>

#include "qprob/error.hpp"
#include "qprob/format.hpp"

namespace qprob {

Grid Grid::from_bounds(double lo, double hi, std::size_t count) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) fail(ErrorKind::InvalidParameter, "grid bounds must be finite");
  if (count == 1) return Grid{lo, 1.0, 1};
  if (count < 2 || !(hi > lo)) fail(ErrorKind::InvalidParameter, "grid needs hi > lo and count >= 2");
  return Grid{lo, (hi - lo) / static_cast<double>(count - 1), count};
}

Grid Grid::aligned(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) fail(ErrorKind::InvalidParameter, "aligned grid needs step > 0 and hi >= lo");
  const double klo = std::floor(lo / step);
  const double khi = std::ceil(hi / step);
  return Grid{klo * step, step, static_cast<std::size_t>(khi - klo) + 1};
}

Grid parse_grid(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() != 3) fail(ErrorKind::Parse, "grid must be lo:hi:count, got '" + std::string(text) + "'");
  double lo = parse_double(parts[0], "grid lo");
  double hi = parse_double(parts[1], "grid hi");
  auto n = parse_int(parts[2], "grid count");
  if (n < 1) fail(ErrorKind::InvalidParameter, "grid count must be positive");
  return Grid::from_bounds(lo, hi, static_cast<std::size_t>(n));
}

std::string format_grid(const Grid& g) {
  return format_double(g.lo) + ":" + format_double(g.hi()) + ":" + std::to_string(g.count);
}

bool same_lattice(const Grid& a, const Grid& b) {
  if (std::abs(a.step - b.step) > 1e-12 * a.step) return false;
  double k = (b.lo - a.lo) / a.step;
  return std::abs(k - std::round(k)) < 1e-9;
}

}  // namespace qprob
