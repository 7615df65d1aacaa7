#pragma once

#include "qw/types.hpp"
#include "qw/walk.hpp"

namespace qw::oracle {

// Full step operator on an L x L torus as one dense matrix of dimension
// 4*L*L. Index layout is site-major with the coin sub-index last:
// index(x, y, c) = 4*(L*y + x) + c, c in {0:r, 1:l, 2:u, 3:d}.
struct GlobalUnitary {
  int side = 0;
  Eigen::MatrixXcd matrix;

  int dimension() const { return 4 * side * side; }
  int index(int x, int y, int c) const { return 4 * (side * y + x) + c; }
};

// (coin per site) * (periodic displacement). Requires side >= 3 so the +1 and
// -1 shifts stay distinguishable.
GlobalUnitary build_global(const CoinMatrix& coin, int side);

// Applies the global matrix `steps` times to the flattened state and
// re-inflates the result. The initial support must lie inside [0, side)^2.
walk::LatticeState evolve_dense(const GlobalUnitary& u,
                                const walk::LatticeState& initial, int steps);

}  // namespace qw::oracle
