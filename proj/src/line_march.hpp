#pragma once

// RK4 propagation of a state along the lattice lines of a grid, in the same
// sweep pattern as integrate_oneform. Rotational coefficients are needed at
// segment midpoints; they come from cubic Lagrange interpolation along the line.

#include <array>
#include <vector>

#include <Eigen/Core>

#include "orthonet/grid.hpp"
#include "orthonet/system.hpp"

namespace orthonet::detail {

inline Eigen::Matrix3d beta_at(const BetaFields& beta, std::size_t p) {
  Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) b(i, j) = beta[i][j].values()[p];
  return b;
}

/// beta at the midpoint of segment [seg, seg + 1] of the line through `line`
/// along `axis`.
inline Eigen::Matrix3d beta_midpoint(const BetaFields& beta, const GridSpec& g, Node line, int axis, int seg) {
  const int n = g.n(axis);
  int first;
  std::array<double, 4> w;
  if (seg == 0) {
    first = 0;
    w = {0.3125, 0.9375, -0.3125, 0.0625};
  } else if (seg == n - 2) {
    first = n - 4;
    w = {0.0625, -0.3125, 0.9375, 0.3125};
  } else {
    first = seg - 1;
    w = {-0.0625, 0.5625, 0.5625, -0.0625};
  }
  Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
  for (int q = 0; q < 4; ++q) {
    line[axis] = first + q;
    b += w[q] * beta_at(beta, g.index(line));
  }
  return b;
}

/// March `values[base]` out over the grid. `rhs(axis, B, y)` is the derivative
/// of the state along `axis` given the coefficient matrix B; `post(y, p)` is
/// applied after each step that lands on flat node p.
template <class State, class Rhs, class Post>
void march(const GridSpec& g, const BetaFields& beta, const Node& base, const std::array<int, 3>& sweep,
           std::vector<State>& values, Rhs&& rhs, Post&& post) {
  for (int stage = 0; stage < 3; ++stage) {
    const int axis = sweep[stage];
    std::array<int, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
      bool free = false;
      for (int s = 0; s < stage; ++s) free = free || sweep[s] == a;
      lo[a] = free ? 0 : base[a];
      hi[a] = free ? g.n(a) - 1 : base[a];
    }
    lo[axis] = hi[axis] = base[axis];
    const double h = g.spacing(axis);
    Node line;
    for (line[0] = lo[0]; line[0] <= hi[0]; ++line[0])
      for (line[1] = lo[1]; line[1] <= hi[1]; ++line[1])
        for (line[2] = lo[2]; line[2] <= hi[2]; ++line[2]) {
          auto step = [&](int from, int to) {
            Node a = line, b = line;
            a[axis] = from;
            b[axis] = to;
            const double s = (to - from) * h;
            const Eigen::Matrix3d B0 = beta_at(beta, g.index(a));
            const Eigen::Matrix3d B1 = beta_at(beta, g.index(b));
            const Eigen::Matrix3d Bm = beta_midpoint(beta, g, line, axis, std::min(from, to));
            const State& y = values[g.index(a)];
            const State k1 = rhs(axis, B0, y);
            const State k2 = rhs(axis, Bm, State(y + 0.5 * s * k1));
            const State k3 = rhs(axis, Bm, State(y + 0.5 * s * k2));
            const State k4 = rhs(axis, B1, State(y + s * k3));
            State next = y + (s / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            post(next, g.index(b));
            values[g.index(b)] = next;
          };
          for (int m = base[axis]; m + 1 < g.n(axis); ++m) step(m, m + 1);
          for (int m = base[axis]; m > 0; --m) step(m, m - 1);
        }
  }
}

}  // namespace orthonet::detail
