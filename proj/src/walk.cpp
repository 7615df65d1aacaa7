#include "qw/walk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <stdexcept>

namespace qw::walk {

namespace {

bool coord_less(const SiteAmplitude& a, const SiteAmplitude& b) {
  return a.y != b.y ? a.y < b.y : a.x < b.x;
}

bool below_prune(const Amplitudes& a) {
  for (const Complex& v : a) {
    if (std::abs(v) >= kPruneThreshold) return false;
  }
  return true;
}

bool all_zero(const Amplitudes& a) {
  for (const Complex& v : a) {
    if (v != 0.0) return false;
  }
  return true;
}

struct Offset {
  std::int32_t dx, dy;
};

constexpr std::array<Offset, 4> kPlaneOffsets{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
constexpr std::array<Offset, 4> kLineOffsets{{{1, 0}, {-1, 0}, {1, 0}, {-1, 0}}};

// Order-preserving packing of (y, x) into one comparable key.
std::int64_t pack_coord(std::int32_t y, std::int32_t x) {
  return (static_cast<std::int64_t>(y) << 32) +
         (static_cast<std::int64_t>(x) + 2147483648LL);
}

// Four-way merge of the component streams, each the (y, x)-sorted input
// shifted by its own offset. Every (site, component) pair has exactly one
// source, so displacement is a relabeling with no additions.
LatticeState displace_with(const LatticeState& s,
                           const std::array<Offset, 4>& off) {
  const auto& in = s.sites();
  const std::size_t n = in.size();
  std::vector<SiteAmplitude> out;
  out.reserve(n + n / 2 + 4);

  std::array<std::size_t, 4> cur{0, 0, 0, 0};
  const auto key_of = [&](int c) {
    const SiteAmplitude& site = in[cur[c]];
    return pack_coord(site.y + off[c].dy, site.x + off[c].dx);
  };

  while (cur[0] < n || cur[1] < n || cur[2] < n || cur[3] < n) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (int c = 0; c < 4; ++c) {
      if (cur[c] < n) best = std::min(best, key_of(c));
    }
    SiteAmplitude site;
    bool placed = false;
    bool nonzero = false;
    for (int c = 0; c < 4; ++c) {
      if (cur[c] < n && key_of(c) == best) {
        const SiteAmplitude& src = in[cur[c]];
        if (!placed) {
          site.x = src.x + off[c].dx;
          site.y = src.y + off[c].dy;
          placed = true;
        }
        site.amp[c] = src.amp[c];
        nonzero = nonzero || src.amp[c] != 0.0;
        ++cur[c];
      }
    }
    if (nonzero) out.push_back(site);
  }
  return LatticeState::from_sorted(std::move(out), s.step_count());
}

void require_line_support(const LatticeState& s) {
  for (const auto& site : s.sites()) {
    if (site.y != 0) {
      throw std::invalid_argument(
          "line-mode state has support off the y = 0 axis");
    }
  }
}

}  // namespace

LatticeState LatticeState::point(std::int32_t x, std::int32_t y,
                                 const Amplitudes& amp) {
  LatticeState s;
  s.sites_.push_back({x, y, amp});
  return s;
}

LatticeState LatticeState::from_sites(std::vector<SiteAmplitude> sites,
                                      int step_count) {
  std::sort(sites.begin(), sites.end(), coord_less);
  std::vector<SiteAmplitude> merged;
  merged.reserve(sites.size());
  for (const auto& site : sites) {
    if (!merged.empty() && merged.back().x == site.x &&
        merged.back().y == site.y) {
      for (int c = 0; c < 4; ++c) merged.back().amp[c] += site.amp[c];
    } else {
      merged.push_back(site);
    }
  }
  std::erase_if(merged, [](const SiteAmplitude& s) { return all_zero(s.amp); });
  return from_sorted(std::move(merged), step_count);
}

LatticeState LatticeState::from_sorted(std::vector<SiteAmplitude> sites,
                                       int step_count) {
  LatticeState s;
  s.sites_ = std::move(sites);
  s.step_count_ = step_count;
  return s;
}

double LatticeState::norm_squared() const {
  double total = 0.0;
  for (const auto& site : sites_) {
    double local = 0.0;
    for (const Complex& v : site.amp) local += std::norm(v);
    total += local;
  }
  return total;
}

const Amplitudes* LatticeState::find(std::int32_t x, std::int32_t y) const {
  SiteAmplitude probe;
  probe.x = x;
  probe.y = y;
  const auto it =
      std::lower_bound(sites_.begin(), sites_.end(), probe, coord_less);
  if (it == sites_.end() || it->x != x || it->y != y) return nullptr;
  return &it->amp;
}

LatticeState symmetric_origin_state() {
  return LatticeState::point(0, 0, {0.5, 0.5, 0.5, 0.5});
}

LatticeState translated(const LatticeState& s, std::int32_t dx,
                        std::int32_t dy) {
  std::vector<SiteAmplitude> sites = s.sites();
  for (auto& site : sites) {
    site.x += dx;
    site.y += dy;
  }
  return LatticeState::from_sorted(std::move(sites), s.step_count());
}

LatticeState displace(const LatticeState& s) {
  return displace_with(s, kPlaneOffsets);
}

LatticeState displace_periodic(const LatticeState& s, int side) {
  if (side < 3) throw std::invalid_argument("periodic side must be >= 3");
  std::vector<Amplitudes> grid(static_cast<std::size_t>(side) * side);
  for (const auto& site : s.sites()) {
    if (site.x < 0 || site.x >= side || site.y < 0 || site.y >= side) {
      throw std::invalid_argument("state has support outside the periodic lattice");
    }
    for (int c = 0; c < 4; ++c) {
      std::int32_t tx = site.x + kPlaneOffsets[c].dx;
      std::int32_t ty = site.y + kPlaneOffsets[c].dy;
      if (tx < 0) tx += side;
      if (tx >= side) tx -= side;
      if (ty < 0) ty += side;
      if (ty >= side) ty -= side;
      grid[static_cast<std::size_t>(ty) * side + tx][c] = site.amp[c];
    }
  }
  std::vector<SiteAmplitude> out;
  out.reserve(s.size() + s.size() / 2 + 4);
  for (std::int32_t y = 0; y < side; ++y) {
    for (std::int32_t x = 0; x < side; ++x) {
      const Amplitudes& amp = grid[static_cast<std::size_t>(y) * side + x];
      if (!all_zero(amp)) out.push_back({x, y, amp});
    }
  }
  return LatticeState::from_sorted(std::move(out), s.step_count());
}

LatticeState displace_line(const LatticeState& s) {
  return displace_with(s, kLineOffsets);
}

LatticeState apply_coin(const LatticeState& s, const CoinMatrix& coin) {
  if (!is_unitary(coin)) {
    throw std::invalid_argument("coin matrix is not unitary");
  }
  std::vector<SiteAmplitude> out(s.sites());
  const std::int64_t n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::int64_t i = 0; i < n; ++i) {
    const Amplitudes& a = s.sites()[static_cast<std::size_t>(i)].amp;
    Amplitudes& o = out[static_cast<std::size_t>(i)].amp;
    for (int row = 0; row < 4; ++row) {
      o[row] = coin(row, 0) * a[0] + coin(row, 1) * a[1] +
               coin(row, 2) * a[2] + coin(row, 3) * a[3];
    }
  }
  std::erase_if(out, [](const SiteAmplitude& site) { return below_prune(site.amp); });
  return LatticeState::from_sorted(std::move(out), s.step_count());
}

LatticeState step(const LatticeState& s, const WalkConfig& cfg) {
  if (cfg.mode == Mode::kLineTwoCoins) {
    return two_coin_line_step(s, cfg.coin);
  }
  LatticeState moved =
      cfg.periodic ? displace_periodic(s, *cfg.periodic) : displace(s);
  LatticeState next = apply_coin(moved, cfg.coin);
  next.set_step_count(s.step_count() + 1);
  return next;
}

LatticeState evolve(const WalkConfig& cfg) {
  if (cfg.steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (!is_unitary(cfg.coin)) {
    throw std::invalid_argument("coin matrix is not unitary");
  }
  if (std::abs(cfg.initial.norm_squared() - 1.0) > kNormTol) {
    throw std::invalid_argument("initial state is not normalized");
  }
  if (cfg.periodic) {
    if (cfg.mode != Mode::kPlane) {
      throw std::invalid_argument("periodic wrap requires plane mode");
    }
    if (*cfg.periodic < 3) {
      throw std::invalid_argument("periodic side must be >= 3");
    }
  }
  if (cfg.mode == Mode::kLineTwoCoins) require_line_support(cfg.initial);

  LatticeState state = cfg.initial;
  for (int i = 0; i < cfg.steps; ++i) state = step(state, cfg);
  return state;
}

LatticeState two_coin_line_step(const LatticeState& s, const CoinMatrix& coin) {
  require_line_support(s);
  LatticeState next = apply_coin(displace_line(s), coin);
  next.set_step_count(s.step_count() + 1);
  return next;
}

ProbabilityField probability(const LatticeState& s) {
  ProbabilityField f;
  f.records.resize(s.size());
  const std::int64_t n = static_cast<std::int64_t>(s.size());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::int64_t i = 0; i < n; ++i) {
    const SiteAmplitude& site = s.sites()[static_cast<std::size_t>(i)];
    SiteProbability& r = f.records[static_cast<std::size_t>(i)];
    r.x = site.x;
    r.y = site.y;
    r.pr = std::norm(site.amp[kRight]);
    r.pl = std::norm(site.amp[kLeft]);
    r.pu = std::norm(site.amp[kUp]);
    r.pd = std::norm(site.amp[kDown]);
    r.p = r.pr + r.pl + r.pu + r.pd;
  }
  double total = 0.0;
  for (const auto& r : f.records) total += r.p;
  f.total = total;
  return f;
}

Marginals marginals(const ProbabilityField& f) {
  std::map<std::int32_t, double> by_x;
  std::map<std::int32_t, double> by_y;
  for (const auto& r : f.records) {
    by_x[r.x] += r.p;
    by_y[r.y] += r.p;
  }
  Marginals m;
  m.x.reserve(by_x.size());
  m.y.reserve(by_y.size());
  for (const auto& [coord, mass] : by_x) m.x.push_back({coord, mass});
  for (const auto& [coord, mass] : by_y) m.y.push_back({coord, mass});
  return m;
}

Slices slices(const ProbabilityField& f) {
  Slices s;
  for (const auto& r : f.records) {
    if (r.y == 0) s.x_axis.push_back({r.x, r.p});  // already ascending in x
  }
  std::map<std::int32_t, double> by_y;
  for (const auto& r : f.records) {
    if (r.x == 0) by_y[r.y] = r.p;
  }
  for (const auto& [coord, mass] : by_y) s.y_axis.push_back({coord, mass});
  return s;
}

Moments moments(const ProbabilityField& f) {
  double ex = 0, ey = 0, exx = 0, eyy = 0;
  for (const auto& r : f.records) {
    ex += r.p * r.x;
    ey += r.p * r.y;
    exx += r.p * static_cast<double>(r.x) * r.x;
    eyy += r.p * static_cast<double>(r.y) * r.y;
  }
  Moments m;
  m.mean_x = ex;
  m.mean_y = ey;
  m.sigma_x = std::sqrt(std::max(0.0, exx - ex * ex));
  m.sigma_y = std::sqrt(std::max(0.0, eyy - ey * ey));
  m.sigma = std::sqrt(m.sigma_x * m.sigma_x + m.sigma_y * m.sigma_y);
  return m;
}

}  // namespace qw::walk
