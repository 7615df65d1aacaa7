#include "qw/fit.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace qw::coin {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

// Parameter vector layout: [theta11, theta12, theta21, theta22,
//                           phi11..phi14, phi21..phi24, phi31..phi34].
constexpr int kNumParams = 16;
using ParamVector = Eigen::Matrix<double, kNumParams, 1>;

ParamVector pack(const OpticalCoinParams& p) {
  ParamVector v;
  for (int k = 0; k < 4; ++k) v[k] = p.theta[k];
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 4; ++k) v[4 + 4 * j + k] = p.phi[j][k];
  }
  return v;
}

OpticalCoinParams unpack(const ParamVector& v) {
  OpticalCoinParams p;
  for (int k = 0; k < 4; ++k) p.theta[k] = v[k];
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 4; ++k) p.phi[j][k] = v[4 + 4 * j + k];
  }
  return p;
}

struct Stages {
  CoinMatrix f1, s1, f2, s2, f3;
  CoinMatrix coin;  // f3 s2 f2 s1 f1
};

Stages build_stages(const OpticalCoinParams& p) {
  Stages st;
  st.f1 = phase_stage(1, p);
  st.s1 = splitter_stage_1(p);
  st.f2 = phase_stage(2, p);
  st.s2 = splitter_stage_2(p);
  st.f3 = phase_stage(3, p);
  st.coin = st.f3 * st.s2 * st.f2 * st.s1 * st.f1;
  return st;
}

// Phase aligning C onto the target: lambda = z/|z| with z = tr(T†C).
Complex alignment_phase(const CoinMatrix& coin, const CoinMatrix& target) {
  const Complex z = (target.adjoint() * coin).trace();
  const double mag = std::abs(z);
  return mag > 0.0 ? z / mag : Complex{1.0, 0.0};
}

double residual_of(const CoinMatrix& coin, const CoinMatrix& target) {
  const Complex lambda = alignment_phase(coin, target);
  return (coin - lambda * target).squaredNorm();
}

// 32-component real residual vector (Re then Im of C - lambda*T).
using ResidualVector = Eigen::Matrix<double, 32, 1>;
using Jacobian = Eigen::Matrix<double, 32, kNumParams>;

ResidualVector real_residual(const CoinMatrix& coin, const CoinMatrix& target,
                             const Complex& lambda) {
  ResidualVector r;
  int k = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j, ++k) {
      const Complex d = coin(i, j) - lambda * target(i, j);
      r[k] = d.real();
      r[16 + k] = d.imag();
    }
  }
  return r;
}

void fill_column(Jacobian& jac, int col, const CoinMatrix& dc) {
  int k = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j, ++k) {
      jac(k, col) = dc(i, j).real();
      jac(16 + k, col) = dc(i, j).imag();
    }
  }
}

// Analytic dC/dp for every parameter via prefix/suffix products of the five
// stage matrices.
Jacobian jacobian_of(const OpticalCoinParams& p, const Stages& st) {
  Jacobian jac;

  const CoinMatrix left_after_s1 = st.f3 * st.s2 * st.f2;   // multiplies dS1
  const CoinMatrix right_before_s1 = st.f1;                 // follows dS1
  const CoinMatrix left_after_s2 = st.f3;                   // multiplies dS2
  const CoinMatrix right_before_s2 = st.f2 * st.s1 * st.f1; // follows dS2

  // Splitter angles.
  for (int k = 0; k < 4; ++k) {
    const double c = std::cos(p.theta[k]);
    const double s = std::sin(p.theta[k]);
    CoinMatrix ds = CoinMatrix::Zero();
    switch (k) {
      case 0:  // theta11: S1 block on (0,1)
        ds(0, 0) = -s; ds(0, 1) = kI * c; ds(1, 0) = kI * c; ds(1, 1) = -s;
        break;
      case 1:  // theta12: S1 block on (2,3)
        ds(2, 2) = -s; ds(2, 3) = kI * c; ds(3, 2) = kI * c; ds(3, 3) = -s;
        break;
      case 2:  // theta21: S2 rows (0,1), columns (0,2)
        ds(0, 0) = -s; ds(0, 2) = kI * c; ds(1, 0) = kI * c; ds(1, 2) = -s;
        break;
      default:  // theta22: S2 rows (2,3), columns (1,3)
        ds(2, 1) = -s; ds(2, 3) = kI * c; ds(3, 1) = kI * c; ds(3, 3) = -s;
        break;
    }
    const CoinMatrix dc = (k < 2) ? CoinMatrix(left_after_s1 * ds * right_before_s1)
                                  : CoinMatrix(left_after_s2 * ds * right_before_s2);
    fill_column(jac, k, dc);
  }

  // Filter phases: dF is diagonal with a single i*e^{i phi} entry, so each
  // dC column is a rank-one outer product of a prefix column and suffix row.
  const CoinMatrix pre_f1 = st.f3 * st.s2 * st.f2 * st.s1;  // C = pre_f1 * F1
  const CoinMatrix pre_f2 = st.f3 * st.s2;                  // C = pre_f2 * F2 * suf_f2
  const CoinMatrix suf_f2 = st.s1 * st.f1;
  const CoinMatrix suf_f3 = st.s2 * st.f2 * st.s1 * st.f1;  // C = F3 * suf_f3

  for (int c = 0; c < 4; ++c) {
    const Complex d1 = kI * std::exp(kI * p.phi[0][c]);
    fill_column(jac, 4 + c, CoinMatrix(pre_f1.col(c) * (d1 * Eigen::RowVector4cd::Unit(c))));

    const Complex d2 = kI * std::exp(kI * p.phi[1][c]);
    fill_column(jac, 8 + c, CoinMatrix((pre_f2.col(c) * d2) * suf_f2.row(c)));

    const Complex d3 = kI * std::exp(kI * p.phi[2][c]);
    CoinMatrix dc = CoinMatrix::Zero();
    dc.row(c) = d3 * suf_f3.row(c);
    fill_column(jac, 12 + c, dc);
  }
  return jac;
}

// Levenberg-Marquardt descent with the alignment phase re-frozen each
// evaluation. Returns the best residual reached.
double refine(ParamVector& v, const CoinMatrix& target, int max_iterations) {
  OpticalCoinParams p = unpack(v);
  Stages st = build_stages(p);
  Complex lambda = alignment_phase(st.coin, target);
  double res = (st.coin - lambda * target).squaredNorm();

  double mu = 1e-3;
  int stalled = 0;
  for (int iter = 0; iter < max_iterations; ++iter) {
    if (res <= 1e-28 || stalled >= 8 || mu > 1e14) break;

    const Jacobian jac = jacobian_of(p, st);
    const ResidualVector rv = real_residual(st.coin, target, lambda);
    const Eigen::Matrix<double, kNumParams, kNumParams> h =
        jac.transpose() * jac;
    const ParamVector g = jac.transpose() * rv;

    bool accepted = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::Matrix<double, kNumParams, kNumParams> damped = h;
      damped.diagonal().array() += mu;
      const ParamVector delta = damped.ldlt().solve(-g);
      const ParamVector trial = v + delta;

      const OpticalCoinParams tp = unpack(trial);
      const Stages tst = build_stages(tp);
      const Complex tl = alignment_phase(tst.coin, target);
      const double tres = (tst.coin - tl * target).squaredNorm();
      if (tres < res) {
        v = trial;
        p = tp;
        st = tst;
        lambda = tl;
        stalled = (res - tres) < 1e-18 * (1.0 + res) ? stalled + 1 : 0;
        res = tres;
        mu = std::max(mu * 0.35, 1e-12);
        accepted = true;
        break;
      }
      mu *= 4.0;
    }
    if (!accepted) ++stalled;
  }
  return res;
}

// Entry phases of the synthesized form with all structural factors divided
// out; used to seed the filter phases from a target's entry arguments.
double structure_arg(int i, int j) {
  static const CoinMatrix kStructure = [] {
    OpticalCoinParams p;
    p.theta = {kPi / 4, kPi / 4, kPi / 4, kPi / 4};
    return closed_form_coin(p);  // zero phases: pure structural factors
  }();
  return std::arg(kStructure(i, j));
}

// Seed derived from the target itself: splitter angles from row/column
// magnitude sums, filter phases by a triangular solve of the phase relations
// in the gauge phi21 = phi22 = phi23 = phi31 = 0.
OpticalCoinParams analytic_seed(const CoinMatrix& t) {
  OpticalCoinParams p{};
  const auto mag = [&](int i, int j) { return std::abs(t(i, j)); };
  p.theta[0] = std::atan2(std::hypot(mag(0, 1), mag(1, 1)),
                          std::hypot(mag(0, 0), mag(1, 0)));
  p.theta[1] = std::atan2(std::hypot(mag(0, 3), mag(1, 3)),
                          std::hypot(mag(0, 2), mag(1, 2)));
  p.theta[2] = std::atan2(std::hypot(mag(0, 2), mag(0, 3)),
                          std::hypot(mag(0, 0), mag(0, 1)));
  p.theta[3] = std::atan2(std::hypot(mag(3, 0), mag(3, 1)),
                          std::hypot(mag(2, 0), mag(2, 1)));

  const auto psi = [&](int i, int j) {
    return std::arg(t(i, j)) - structure_arg(i, j);
  };
  for (int j = 0; j < 4; ++j) p.phi[0][j] = psi(0, j);
  p.phi[2][1] = psi(1, 0) - psi(0, 0);
  p.phi[2][2] = psi(2, 0) - psi(0, 0);
  p.phi[2][3] = psi(3, 0) - psi(0, 0);
  p.phi[1][3] = psi(2, 2) - psi(0, 2) - psi(2, 0) + psi(0, 0);
  return p;
}

}  // namespace

double fit_residual(const OpticalCoinParams& p, const CoinMatrix& target) {
  return residual_of(synthesize_coin(p), target);
}

FitResult fit_params(const CoinMatrix& target, const FitConfig& config) {
  if (const double defect = unitarity_defect(target);
      defect > kFitTargetUnitarityTol) {
    throw std::invalid_argument("fit target is not unitary (defect " +
                                std::to_string(defect) + ")");
  }

  const auto finish = [&](const ParamVector& v, int start_index) {
    FitResult out;
    out.params = normalize_params(unpack(v));
    out.residual = fit_residual(out.params, target);
    out.converged = out.residual <= config.success_threshold;
    out.best_start = start_index;
    return out;
  };

  // Seeded start first; for any target produced by the decomposition itself
  // this already lands in the basin of the exact solution.
  ParamVector seeded = pack(analytic_seed(target));
  double best_res = refine(seeded, target, config.max_iterations);
  if (best_res <= config.success_threshold) return finish(seeded, 0);

  ParamVector best_v = seeded;
  int best_index = 0;

  const int starts = std::max(config.starts, 0);
  std::vector<double> results(starts);
  std::vector<ParamVector> points(starts);

#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < starts; ++s) {
    // Per-start stream: deterministic regardless of thread assignment.
    std::mt19937_64 rng(config.seed + 0x9e3779b97f4a7c15ULL * (s + 1));
    std::uniform_real_distribution<double> angle(0.0, kPi / 2);
    std::uniform_real_distribution<double> phase(-kPi, kPi);
    OpticalCoinParams p;
    for (auto& th : p.theta) th = angle(rng);
    for (auto& stage : p.phi) {
      for (auto& v : stage) v = phase(rng);
    }
    points[s] = pack(p);
    results[s] = refine(points[s], target, config.max_iterations);
  }

  // Merge by minimum residual, index order breaking ties.
  for (int s = 0; s < starts; ++s) {
    if (results[s] < best_res) {
      best_res = results[s];
      best_v = points[s];
      best_index = s + 1;
    }
  }
  return finish(best_v, best_index);
}

}  // namespace qw::coin
