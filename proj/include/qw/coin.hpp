#pragma once

#include <array>

#include "qw/types.hpp"

namespace qw::coin {

// The 16 real parameters of the five-stage optical decomposition
//
//   C = F3 · S2 · F2 · S1 · F1
//
// where F1..F3 are per-channel phase filters and S1, S2 are beam-splitter
// stages. S1 mixes channels (1,2) with angle theta11 and (3,4) with theta12;
// S2 mixes inputs (1,3) into outputs (1,2) with theta21 and inputs (2,4)
// into outputs (3,4) with theta22.
struct OpticalCoinParams {
  // Splitter angles, radians: {theta11, theta12, theta21, theta22}.
  std::array<double, 4> theta{};
  // phi[j][k]: phase added by filter stage j+1 to channel k+1, radians.
  std::array<std::array<double, 4>, 3> phi{};
};

// Per-entry accumulated phases alpha[i][j] of the synthesized matrix.
// Each alpha is the fixed three-term sum
//   alpha_ij = phi1[j] + phi2[(i>=2) + 2*(j>=2)] + phi3[i]   (0-based).
struct PhaseLedger {
  std::array<std::array<double, 4>, 4> alpha{};
};

// Diagonal filter matrix diag(e^{i phi_j1}, ..., e^{i phi_j4}).
// stage is 1-based in {1,2,3}; anything else throws std::invalid_argument.
CoinMatrix phase_stage(int stage, const OpticalCoinParams& p);

// Pairwise splitter on channels (1,2) and (3,4): blocks [[cos, i sin], [i sin, cos]].
CoinMatrix splitter_stage_1(const OpticalCoinParams& p);

// Crossed splitter: out1/out2 mix in1 with in3 (theta21), out3/out4 mix in2
// with in4 (theta22). At zero angle this is the permutation (in1,in3,in2,in4).
CoinMatrix splitter_stage_2(const OpticalCoinParams& p);

// Explicit product F3 S2 F2 S1 F1. Unitary for any finite parameters.
CoinMatrix synthesize_coin(const OpticalCoinParams& p);

// The alpha phases of the closed-form entries.
PhaseLedger phase_ledger(const OpticalCoinParams& p);

// Entry-by-entry closed form c_ij s_ij e^{i alpha_ij}; agrees with
// synthesize_coin entrywise. The (3,3) magnitude is s12*s22.
CoinMatrix closed_form_coin(const OpticalCoinParams& p);

// (1/2) [[-1,1,1,1],[1,-1,1,1],[1,1,-1,1],[1,1,1,-1]].
CoinMatrix grover_coin();

// Four-point DFT: (1/2) [[1,1,1,1],[1,i,-1,-i],[1,-1,1,-1],[1,-i,-1,i]].
CoinMatrix dft_coin();

// The directly synthesizable variant of the DFT coin; equals
// permute_lu(dft_prime_coin()) == dft_coin().
CoinMatrix dft_prime_coin();

// Conjugation A·c·A^{-1} by the permutation exchanging basis indices 2 and 3
// (the l and u beams). Pure entry relabeling, hence an exact involution.
CoinMatrix permute_lu(const CoinMatrix& c);

// Preset parameter sets. synthesize_coin(grover_params()) reproduces the
// Grover coin; synthesize_coin(dft_params()) reproduces dft_prime_coin().
OpticalCoinParams grover_params();
OpticalCoinParams dft_params();

// True iff a unit scalar lambda exists with max-entry |a - lambda*b| <= tol.
// lambda is read off the entry pair with the largest magnitude product.
bool equal_up_to_global_phase(const CoinMatrix& a, const CoinMatrix& b,
                              double tol);

// Maps parameters into canonical ranges theta in [0, pi/2], phi in (-pi, pi]
// without changing the synthesized matrix. Rewrite rules, applied per splitter
// angle after reduction mod 2*pi:
//   theta in (pi, 2*pi):  theta -> theta - pi, and pi is added to the two
//     downstream filter phases of the block's output channels;
//   theta in (pi/2, pi]:  theta -> pi - theta, and (+pi/2, -pi/2) is added to
//     the downstream filter phases of the block's output channels while
//     (+pi/2, -pi/2) is added to the upstream phases of its input channels.
// Downstream/upstream filters are F2/F1 for S1 blocks and F3/F2 for S2 blocks.
OpticalCoinParams normalize_params(const OpticalCoinParams& p);

}  // namespace qw::coin
