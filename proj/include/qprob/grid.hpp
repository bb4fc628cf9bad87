#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace qprob {

// Uniform grid of `count` nodes lo, lo+step, ..., lo+(count-1)*step.
struct Grid {
  double lo = 0.0;
  double step = 1.0;
  std::size_t count = 0;

  double at(std::size_t i) const { return lo + step * static_cast<double>(i); }
  double hi() const { return count == 0 ? lo : at(count - 1); }
  bool contains(double x) const { return count > 0 && x >= lo && x <= hi(); }

  static Grid from_bounds(double lo, double hi, std::size_t count);
  // Grid with the given step whose nodes are integer multiples of step and cover [lo, hi].
  static Grid aligned(double lo, double hi, double step);

  friend bool operator==(const Grid&, const Grid&) = default;
};

// "lo:hi:count"
Grid parse_grid(std::string_view text);
std::string format_grid(const Grid& g);

// True when both grids have the same step (relative 1e-12) and b's nodes sit on a's lattice.
bool same_lattice(const Grid& a, const Grid& b);

}  // namespace qprob
