#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qw {

using Complex = std::complex<double>;

// 4x4 unitary acting on the internal coin space, basis order (r, l, u, d).
using CoinMatrix = Eigen::Matrix4cd;

// Coin component indices in basis order.
inline constexpr int kRight = 0;
inline constexpr int kLeft = 1;
inline constexpr int kUp = 2;
inline constexpr int kDown = 3;
inline constexpr int kCoinDim = 4;

// Unitarity tolerance for coin matrices: max-norm(C†C − I) must stay below this.
inline constexpr double kCoinUnitarityTol = 1e-12;

// Max-norm of C†C − I.
inline double unitarity_defect(const CoinMatrix& c) {
  return ((c.adjoint() * c) - CoinMatrix::Identity()).cwiseAbs().maxCoeff();
}

inline bool is_unitary(const CoinMatrix& c, double tol = kCoinUnitarityTol) {
  return unitarity_defect(c) <= tol;
}

// Largest entrywise |a - b|.
inline double max_entry_diff(const CoinMatrix& a, const CoinMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace qw
