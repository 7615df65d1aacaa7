#include "qw/coin.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qw::coin {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

void require_finite(const OpticalCoinParams& p) {
  for (double t : p.theta) {
    if (!std::isfinite(t)) throw std::invalid_argument("non-finite splitter angle");
  }
  for (const auto& stage : p.phi) {
    for (double v : stage) {
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite filter phase");
    }
  }
}

// Wraps into (-pi, pi].
double wrap_phase(double phi) {
  double w = std::fmod(phi + kPi, 2.0 * kPi);
  if (w <= 0.0) w += 2.0 * kPi;
  return w - kPi;
}

}  // namespace

CoinMatrix phase_stage(int stage, const OpticalCoinParams& p) {
  if (stage < 1 || stage > 3) {
    throw std::invalid_argument("phase stage index must be 1, 2 or 3");
  }
  const auto& phi = p.phi[stage - 1];
  CoinMatrix f = CoinMatrix::Zero();
  for (int k = 0; k < kCoinDim; ++k) {
    f(k, k) = std::exp(kI * phi[k]);
  }
  return f;
}

CoinMatrix splitter_stage_1(const OpticalCoinParams& p) {
  const double c1 = std::cos(p.theta[0]), s1 = std::sin(p.theta[0]);
  const double c2 = std::cos(p.theta[1]), s2 = std::sin(p.theta[1]);
  CoinMatrix s = CoinMatrix::Zero();
  s(0, 0) = c1;
  s(0, 1) = kI * s1;
  s(1, 0) = kI * s1;
  s(1, 1) = c1;
  s(2, 2) = c2;
  s(2, 3) = kI * s2;
  s(3, 2) = kI * s2;
  s(3, 3) = c2;
  return s;
}

CoinMatrix splitter_stage_2(const OpticalCoinParams& p) {
  const double c1 = std::cos(p.theta[2]), s1 = std::sin(p.theta[2]);
  const double c2 = std::cos(p.theta[3]), s2 = std::sin(p.theta[3]);
  CoinMatrix s = CoinMatrix::Zero();
  s(0, 0) = c1;
  s(0, 2) = kI * s1;
  s(1, 0) = kI * s1;
  s(1, 2) = c1;
  s(2, 1) = c2;
  s(2, 3) = kI * s2;
  s(3, 1) = kI * s2;
  s(3, 3) = c2;
  return s;
}

CoinMatrix synthesize_coin(const OpticalCoinParams& p) {
  require_finite(p);
  return phase_stage(3, p) * splitter_stage_2(p) * phase_stage(2, p) *
         splitter_stage_1(p) * phase_stage(1, p);
}

PhaseLedger phase_ledger(const OpticalCoinParams& p) {
  PhaseLedger ledger;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const int mid = (i >= 2 ? 1 : 0) + (j >= 2 ? 2 : 0);
      ledger.alpha[i][j] = p.phi[0][j] + p.phi[1][mid] + p.phi[2][i];
    }
  }
  return ledger;
}

CoinMatrix closed_form_coin(const OpticalCoinParams& p) {
  require_finite(p);
  const double c11 = std::cos(p.theta[0]), s11 = std::sin(p.theta[0]);
  const double c12 = std::cos(p.theta[1]), s12 = std::sin(p.theta[1]);
  const double c21 = std::cos(p.theta[2]), s21 = std::sin(p.theta[2]);
  const double c22 = std::cos(p.theta[3]), s22 = std::sin(p.theta[3]);

  CoinMatrix base;
  base << c11 * c21, kI * s11 * c21, kI * c12 * s21, -s12 * s21,  //
      kI * c11 * s21, -s11 * s21, c12 * c21, kI * s12 * c21,      //
      kI * s11 * c22, c11 * c22, -s12 * s22, kI * c12 * s22,      //
      -s11 * s22, kI * c11 * s22, kI * s12 * c22, c12 * c22;

  const PhaseLedger ledger = phase_ledger(p);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      base(i, j) *= std::exp(kI * ledger.alpha[i][j]);
    }
  }
  return base;
}

CoinMatrix grover_coin() {
  CoinMatrix g;
  g << -1, 1, 1, 1,  //
      1, -1, 1, 1,   //
      1, 1, -1, 1,   //
      1, 1, 1, -1;
  return 0.5 * g;
}

CoinMatrix dft_coin() {
  CoinMatrix d;
  d << 1, 1, 1, 1,        //
      1, kI, -1, -kI,     //
      1, -1, 1, -1,       //
      1, -kI, -1, kI;
  return 0.5 * d;
}

CoinMatrix dft_prime_coin() {
  CoinMatrix d;
  d << 1, 1, 1, 1,     //
      1, 1, -1, -1,    //
      1, -1, kI, -kI,  //
      1, -1, -kI, kI;
  return 0.5 * d;
}

CoinMatrix permute_lu(const CoinMatrix& c) {
  // sigma swaps indices 1 and 2 (0-based); out(i,j) = in(sigma(i), sigma(j)).
  constexpr int sigma[4] = {0, 2, 1, 3};
  CoinMatrix out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      out(i, j) = c(sigma[i], sigma[j]);
    }
  }
  return out;
}

OpticalCoinParams grover_params() {
  OpticalCoinParams p;
  p.theta = {kPi / 4, kPi / 4, kPi / 4, kPi / 4};
  p.phi = {{{-kPi / 2, 0.0, kPi / 2, 0.0},
            {-kPi / 2, -kPi / 2, kPi, kPi},
            {0.0, kPi / 2, kPi / 2, 0.0}}};
  return p;
}

OpticalCoinParams dft_params() {
  OpticalCoinParams p;
  p.theta = {kPi / 4, kPi / 4, kPi / 4, kPi / 4};
  p.phi = {{{0.0, -kPi / 2, 0.0, -kPi / 2},
            {kPi / 2, 0.0, 0.0, 0.0},
            {-kPi / 2, -kPi, -kPi / 2, -kPi}}};
  return p;
}

bool equal_up_to_global_phase(const CoinMatrix& a, const CoinMatrix& b,
                              double tol) {
  int bi = 0, bj = 0;
  double best = -1.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double mag = std::abs(a(i, j)) * std::abs(b(i, j));
      if (mag > best) {
        best = mag;
        bi = i;
        bj = j;
      }
    }
  }
  if (best <= 0.0) {
    // No overlapping support; equal only if both are (numerically) zero.
    return a.cwiseAbs().maxCoeff() <= tol && b.cwiseAbs().maxCoeff() <= tol;
  }
  const Complex ratio = a(bi, bj) / b(bi, bj);
  const Complex lambda = ratio / std::abs(ratio);
  return max_entry_diff(a, lambda * b) <= tol;
}

OpticalCoinParams normalize_params(const OpticalCoinParams& p) {
  require_finite(p);
  OpticalCoinParams q = p;

  // For each splitter angle: the downstream filter stage and its two output
  // channels, and the upstream filter stage and its two input channels.
  struct BlockWiring {
    int down_stage, out_a, out_b;
    int up_stage, in_a, in_b;
  };
  constexpr BlockWiring wiring[4] = {
      {1, 0, 1, 0, 0, 1},  // theta11: S1 block on channels (1,2)
      {1, 2, 3, 0, 2, 3},  // theta12: S1 block on channels (3,4)
      {2, 0, 1, 1, 0, 2},  // theta21: S2 block, inputs (1,3) -> outputs (1,2)
      {2, 2, 3, 1, 1, 3},  // theta22: S2 block, inputs (2,4) -> outputs (3,4)
  };

  for (int k = 0; k < 4; ++k) {
    double theta = std::fmod(q.theta[k], 2.0 * kPi);
    if (theta < 0.0) theta += 2.0 * kPi;
    const BlockWiring& w = wiring[k];
    if (theta > kPi) {
      // (cos, sin) -> (-cos, -sin): a -1 on the block, pushed out as a pi
      // phase on both output channels.
      theta -= kPi;
      q.phi[w.down_stage][w.out_a] += kPi;
      q.phi[w.down_stage][w.out_b] += kPi;
    }
    if (theta > kPi / 2) {
      // (cos, sin) -> (-cos, sin): diag(i, -i) on both sides of the block.
      theta = kPi - theta;
      q.phi[w.down_stage][w.out_a] += kPi / 2;
      q.phi[w.down_stage][w.out_b] -= kPi / 2;
      q.phi[w.up_stage][w.in_a] += kPi / 2;
      q.phi[w.up_stage][w.in_b] -= kPi / 2;
    }
    q.theta[k] = theta;
  }

  for (auto& stage : q.phi) {
    for (double& v : stage) v = wrap_phase(v);
  }
  return q;
}

}  // namespace qw::coin
