#include "qw/dense_oracle.hpp"

#include <stdexcept>

namespace qw::oracle {

namespace {

constexpr int kShift[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

int wrap(int v, int side) {
  if (v < 0) return v + side;
  if (v >= side) return v - side;
  return v;
}

}  // namespace

GlobalUnitary build_global(const CoinMatrix& coin, int side) {
  if (side < 3) throw std::invalid_argument("lattice side must be >= 3");

  GlobalUnitary u;
  u.side = side;
  const int dim = u.dimension();

  // Displacement permutation: |x, y, c> -> |x + dx_c, y + dy_c, c| mod side.
  Eigen::MatrixXcd displacement = Eigen::MatrixXcd::Zero(dim, dim);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      for (int c = 0; c < 4; ++c) {
        const int tx = wrap(x + kShift[c][0], side);
        const int ty = wrap(y + kShift[c][1], side);
        displacement(u.index(tx, ty, c), u.index(x, y, c)) = 1.0;
      }
    }
  }

  Eigen::MatrixXcd coin_global = Eigen::MatrixXcd::Zero(dim, dim);
  for (int site = 0; site < side * side; ++site) {
    coin_global.block<4, 4>(4 * site, 4 * site) = coin;
  }

  u.matrix = coin_global * displacement;
  return u;
}

walk::LatticeState evolve_dense(const GlobalUnitary& u,
                                const walk::LatticeState& initial, int steps) {
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");

  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(u.dimension());
  for (const auto& site : initial.sites()) {
    if (site.x < 0 || site.x >= u.side || site.y < 0 || site.y >= u.side) {
      throw std::invalid_argument("initial support outside the lattice");
    }
    for (int c = 0; c < 4; ++c) v[u.index(site.x, site.y, c)] = site.amp[c];
  }

  for (int n = 0; n < steps; ++n) v = u.matrix * v;

  std::vector<walk::SiteAmplitude> sites;
  for (int y = 0; y < u.side; ++y) {
    for (int x = 0; x < u.side; ++x) {
      walk::Amplitudes amp{};
      bool nonzero = false;
      for (int c = 0; c < 4; ++c) {
        amp[c] = v[u.index(x, y, c)];
        nonzero = nonzero || amp[c] != 0.0;
      }
      if (nonzero) sites.push_back({x, y, amp});
    }
  }
  return walk::LatticeState::from_sorted(std::move(sites),
                                         initial.step_count() + steps);
}

}  // namespace qw::oracle
