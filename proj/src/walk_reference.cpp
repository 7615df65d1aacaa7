#include "qw/walk_reference.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace qw::walk::reference {

namespace {

using SiteMap = std::map<std::pair<std::int32_t, std::int32_t>, Amplitudes>;

SiteMap to_map(const LatticeState& s) {
  SiteMap m;
  for (const auto& site : s.sites()) m[{site.y, site.x}] = site.amp;
  return m;
}

LatticeState to_state(const SiteMap& m, int step_count) {
  std::vector<SiteAmplitude> sites;
  sites.reserve(m.size());
  for (const auto& [coord, amp] : m) {
    sites.push_back({coord.second, coord.first, amp});
  }
  return LatticeState::from_sorted(std::move(sites), step_count);
}

std::int32_t wrap(std::int32_t v, int side) {
  std::int32_t w = v % side;
  return w < 0 ? w + side : w;
}

}  // namespace

LatticeState evolve(const WalkConfig& cfg) {
  if (cfg.steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (!is_unitary(cfg.coin)) {
    throw std::invalid_argument("coin matrix is not unitary");
  }

  const bool line = cfg.mode == Mode::kLineTwoCoins;
  const std::array<std::array<std::int32_t, 2>, 4> shift =
      line ? std::array<std::array<std::int32_t, 2>, 4>{{{1, 0}, {-1, 0}, {1, 0}, {-1, 0}}}
           : std::array<std::array<std::int32_t, 2>, 4>{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

  SiteMap state = to_map(cfg.initial);
  for (int n = 0; n < cfg.steps; ++n) {
    SiteMap moved;
    for (const auto& [coord, amp] : state) {
      for (int c = 0; c < 4; ++c) {
        if (amp[c] == 0.0) continue;
        std::int32_t x = coord.second + shift[c][0];
        std::int32_t y = coord.first + shift[c][1];
        if (cfg.periodic) {
          x = wrap(x, *cfg.periodic);
          y = wrap(y, *cfg.periodic);
        }
        moved[{y, x}][c] = amp[c];
      }
    }
    SiteMap next;
    for (const auto& [coord, amp] : moved) {
      Amplitudes o{};
      double peak = 0.0;
      for (int row = 0; row < 4; ++row) {
        o[row] = cfg.coin(row, 0) * amp[0] + cfg.coin(row, 1) * amp[1] +
                 cfg.coin(row, 2) * amp[2] + cfg.coin(row, 3) * amp[3];
        peak = std::max(peak, std::abs(o[row]));
      }
      if (peak >= kPruneThreshold) next[coord] = o;
    }
    state = std::move(next);
  }
  return to_state(state, cfg.initial.step_count() + cfg.steps);
}

}  // namespace qw::walk::reference
