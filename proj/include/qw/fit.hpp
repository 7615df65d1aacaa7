#pragma once

#include <cstdint>

#include "qw/coin.hpp"
#include "qw/types.hpp"

namespace qw::coin {

// Targets must satisfy max-norm(T†T − I) below this before fitting.
inline constexpr double kFitTargetUnitarityTol = 1e-10;

struct FitConfig {
  int starts = 64;                   // random multi-starts after the seeded one
  int max_iterations = 2000;         // per-start iteration cap
  double success_threshold = 1e-16;  // residual at or below this => converged
  std::uint64_t seed = 12345;        // explicit, never wall-clock derived
};

struct FitResult {
  OpticalCoinParams params;  // best parameters found, canonicalized
  double residual = 0.0;     // min over |lambda|=1 of sum |C(params) - lambda*T|^2
  bool converged = false;
  int best_start = 0;  // 0 = magnitude/phase-derived seed, 1.. = random starts
};

// Least-squares fit of the five-stage decomposition to a unitary target.
// Minimizes the global-phase-reduced residual by Levenberg-Marquardt descent
// from a seed derived from the target's entry magnitudes and phases, falling
// back to config.starts random restarts. A residual above success_threshold
// after all starts is reported as not reachable (converged == false), which
// is an outcome, not an error. Throws std::invalid_argument for non-unitary
// targets.
FitResult fit_params(const CoinMatrix& target, const FitConfig& config = {});

// The fit objective for one parameter point (exposed for diagnostics).
double fit_residual(const OpticalCoinParams& p, const CoinMatrix& target);

}  // namespace qw::coin
