#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qw/types.hpp"

namespace qw::walk {

// Amplitudes of the four coin components at one site, order (r, l, u, d).
using Amplitudes = std::array<Complex, 4>;

struct SiteAmplitude {
  std::int32_t x = 0;
  std::int32_t y = 0;
  Amplitudes amp{};
};

// Sites with every component below this magnitude may be dropped from storage.
inline constexpr double kPruneThreshold = 1e-15;

// States must have |norm^2 - 1| within this bound where normalization is a
// precondition.
inline constexpr double kNormTol = 1e-10;

// Sparse walker state: occupied sites kept sorted by (y, x) with unique
// coordinates. Amplitude storage never holds a site whose four components
// all sit below the pruning threshold after a coin application.
class LatticeState {
 public:
  LatticeState() = default;

  static LatticeState point(std::int32_t x, std::int32_t y,
                            const Amplitudes& amp);

  // Sorts, merges duplicate coordinates by summing, drops all-zero sites.
  static LatticeState from_sites(std::vector<SiteAmplitude> sites,
                                 int step_count = 0);

  // Adopts already (y, x)-sorted unique records without reordering.
  static LatticeState from_sorted(std::vector<SiteAmplitude> sites,
                                  int step_count);

  const std::vector<SiteAmplitude>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  int step_count() const { return step_count_; }
  void set_step_count(int n) { step_count_ = n; }

  // Fixed-order sum of |amplitude|^2, independent of worker partitioning.
  double norm_squared() const;

  // nullptr when the site is not stored.
  const Amplitudes* find(std::int32_t x, std::int32_t y) const;

 private:
  std::vector<SiteAmplitude> sites_;
  int step_count_ = 0;
};

// |0,0> ⊗ (1/2)(|r> + |l> + |u> + |d>), the default initial condition.
LatticeState symmetric_origin_state();

// Same amplitudes at coordinates shifted by (dx, dy).
LatticeState translated(const LatticeState& s, std::int32_t dx,
                        std::int32_t dy);

enum class Mode { kPlane, kLineTwoCoins };

struct WalkConfig {
  CoinMatrix coin = CoinMatrix::Identity();
  int steps = 0;
  LatticeState initial;
  Mode mode = Mode::kPlane;
  // Wrap coordinates modulo L on an L x L torus (plane mode only, L >= 3).
  std::optional<int> periodic;
};

// Conditional displacement: r -> (x+1, y), l -> (x-1, y), u -> (x, y+1),
// d -> (x, y-1). Pure relabeling; norm preserved exactly.
LatticeState displace(const LatticeState& s);

// Displacement with coordinates wrapped modulo `side`; coordinates must lie
// in [0, side).
LatticeState displace_periodic(const LatticeState& s, int side);

// Line-mode displacement: r and u move x+1, l and d move x-1; y untouched.
LatticeState displace_line(const LatticeState& s);

// Left-multiplies every occupied site's component vector by the coin.
// Throws std::invalid_argument for a non-unitary coin.
LatticeState apply_coin(const LatticeState& s, const CoinMatrix& coin);

// One walk step: displacement first, then the coin.
LatticeState step(const LatticeState& s, const WalkConfig& cfg);

// steps-fold composition of step. Validates the whole configuration.
LatticeState evolve(const WalkConfig& cfg);

// One step of the walk on the line with the four-component coin; the state
// must be supported on y = 0.
LatticeState two_coin_line_step(const LatticeState& s, const CoinMatrix& coin);

struct SiteProbability {
  std::int32_t x = 0;
  std::int32_t y = 0;
  double pr = 0, pl = 0, pu = 0, pd = 0;
  double p = 0;  // pr + pl + pu + pd
};

struct ProbabilityField {
  std::vector<SiteProbability> records;  // sorted by (y, x)
  double total = 0.0;                    // fixed-order sum of p
};

ProbabilityField probability(const LatticeState& s);

struct AxisMass {
  std::int32_t coord = 0;
  double mass = 0.0;
};

struct Marginals {
  std::vector<AxisMass> x;  // sum over y, ascending x
  std::vector<AxisMass> y;  // sum over x, ascending y
};

struct Slices {
  std::vector<AxisMass> x_axis;  // P(x, 0), ascending x
  std::vector<AxisMass> y_axis;  // P(0, y), ascending y
};

Marginals marginals(const ProbabilityField& f);
Slices slices(const ProbabilityField& f);

struct Moments {
  double mean_x = 0, mean_y = 0;
  double sigma_x = 0, sigma_y = 0;
  double sigma = 0;  // sqrt(sigma_x^2 + sigma_y^2)
};

Moments moments(const ProbabilityField& f);

}  // namespace qw::walk
