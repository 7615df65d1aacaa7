#pragma once

#include <map>
#include <random>
#include <utility>

#include "qw/coin.hpp"
#include "qw/walk.hpp"

namespace qw::test {

inline coin::OpticalCoinParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi / 2);
  std::uniform_real_distribution<double> phase(-std::numbers::pi,
                                               std::numbers::pi);
  coin::OpticalCoinParams p;
  for (auto& th : p.theta) th = angle(rng);
  for (auto& stage : p.phi) {
    for (auto& v : stage) v = phase(rng);
  }
  return p;
}

// Haar-distributed 4x4 unitary: QR of a complex Gaussian matrix with the
// R-diagonal phases divided out.
inline CoinMatrix random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  CoinMatrix g;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<CoinMatrix> qr(g);
  CoinMatrix q = qr.householderQ();
  const CoinMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 4; ++i) {
    Complex d = r(i, i);
    d = d == 0.0 ? Complex(1.0, 0.0) : d / std::abs(d);
    q.col(i) *= std::conj(d);
  }
  return q;
}

// Random normalized state on ~count sites inside |x|,|y| <= extent.
inline walk::LatticeState random_state(std::mt19937_64& rng, int count,
                                       int extent) {
  std::uniform_int_distribution<int> coord(-extent, extent);
  std::normal_distribution<double> gauss;
  std::vector<walk::SiteAmplitude> sites;
  for (int i = 0; i < count; ++i) {
    walk::SiteAmplitude site;
    site.x = coord(rng);
    site.y = coord(rng);
    for (auto& a : site.amp) a = Complex(gauss(rng), gauss(rng));
    sites.push_back(site);
  }
  walk::LatticeState s = walk::LatticeState::from_sites(std::move(sites));
  const double scale = 1.0 / std::sqrt(s.norm_squared());
  std::vector<walk::SiteAmplitude> scaled = s.sites();
  for (auto& site : scaled) {
    for (auto& a : site.amp) a *= scale;
  }
  return walk::LatticeState::from_sorted(std::move(scaled), 0);
}

// Largest amplitude difference between two states over the union of their
// supports.
inline double max_state_diff(const walk::LatticeState& a,
                             const walk::LatticeState& b) {
  double worst = 0.0;
  const auto scan = [&](const walk::LatticeState& lhs,
                        const walk::LatticeState& rhs) {
    for (const auto& site : lhs.sites()) {
      const walk::Amplitudes* other = rhs.find(site.x, site.y);
      for (int c = 0; c < 4; ++c) {
        const Complex ref = other ? (*other)[c] : Complex{};
        worst = std::max(worst, std::abs(site.amp[c] - ref));
      }
    }
  };
  scan(a, b);
  scan(b, a);
  return worst;
}

// Independent walk on the line: dense array over [-steps, steps], each site
// holding the 4-component coin vector; component c moves by (+1,-1,+1,-1)[c]
// each step, then the coin is applied. Written against the defining rule, not
// against the engine.
inline std::map<int, walk::Amplitudes> line_walk_reference(
    const CoinMatrix& coin, const std::map<int, walk::Amplitudes>& initial,
    int steps) {
  constexpr int kShift[4] = {1, -1, 1, -1};
  std::map<int, walk::Amplitudes> state = initial;
  for (int n = 0; n < steps; ++n) {
    std::map<int, walk::Amplitudes> moved;
    for (const auto& [x, amp] : state) {
      for (int c = 0; c < 4; ++c) {
        if (amp[c] != 0.0) moved[x + kShift[c]][c] = amp[c];
      }
    }
    for (auto& [x, amp] : moved) {
      walk::Amplitudes o{};
      for (int row = 0; row < 4; ++row) {
        o[row] = coin(row, 0) * amp[0] + coin(row, 1) * amp[1] +
                 coin(row, 2) * amp[2] + coin(row, 3) * amp[3];
      }
      amp = o;
    }
    state = std::move(moved);
  }
  return state;
}

}  // namespace qw::test
