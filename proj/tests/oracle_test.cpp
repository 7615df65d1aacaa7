#include <doctest.h>

#include <random>

#include "qw/coin.hpp"
#include "qw/dense_oracle.hpp"
#include "qw/walk.hpp"
#include "test_util.hpp"

using namespace qw;

TEST_CASE("identity coin gives a pure displacement permutation") {
  const oracle::GlobalUnitary u = oracle::build_global(CoinMatrix::Identity(), 3);
  REQUIRE(u.dimension() == 36);
  for (int col = 0; col < u.dimension(); ++col) {
    int nonzeros = 0;
    for (int row = 0; row < u.dimension(); ++row) {
      const Complex v = u.matrix(row, col);
      if (v != 0.0) {
        CHECK(v == Complex{1.0, 0.0});
        ++nonzeros;
      }
    }
    CHECK(nonzeros == 1);
  }
}

TEST_CASE("grover global step on L=3 is unitary") {
  const oracle::GlobalUnitary u = oracle::build_global(coin::grover_coin(), 3);
  const Eigen::MatrixXcd defect =
      u.matrix.adjoint() * u.matrix -
      Eigen::MatrixXcd::Identity(u.dimension(), u.dimension());
  CHECK(defect.cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("column of basis (0,0,r) feeds only site (1,0)") {
  const oracle::GlobalUnitary u = oracle::build_global(coin::grover_coin(), 3);
  const int col = u.index(0, 0, kRight);
  for (int row = 0; row < u.dimension(); ++row) {
    if (u.matrix(row, col) != 0.0) {
      const int site = row / 4;
      CHECK(site % 3 == 1);  // x == 1
      CHECK(site / 3 == 0);  // y == 0
    }
  }
}

TEST_CASE("build_global rejects tiny lattices") {
  CHECK_THROWS_AS(oracle::build_global(coin::grover_coin(), 2),
                  std::invalid_argument);
}

TEST_CASE("global matrices stay unitary for random coins") {
  std::mt19937_64 rng(401);
  const auto check_defect = [](const oracle::GlobalUnitary& u) {
    const Eigen::MatrixXcd defect =
        u.matrix.adjoint() * u.matrix -
        Eigen::MatrixXcd::Identity(u.dimension(), u.dimension());
    return defect.cwiseAbs().maxCoeff();
  };
  for (int trial = 0; trial < 20; ++trial) {
    CHECK(check_defect(oracle::build_global(qw::test::random_unitary(rng), 3)) <=
          1e-12);
  }
  for (int trial = 0; trial < 20; ++trial) {
    CHECK(check_defect(oracle::build_global(qw::test::random_unitary(rng), 5)) <=
          1e-12);
  }
  for (int trial = 0; trial < 10; ++trial) {
    CHECK(check_defect(oracle::build_global(qw::test::random_unitary(rng), 9)) <=
          1e-12);
  }
}

TEST_CASE("dense evolution basics") {
  const oracle::GlobalUnitary grover = oracle::build_global(coin::grover_coin(), 5);
  const walk::LatticeState start =
      walk::LatticeState::point(2, 2, {0.5, 0.5, 0.5, 0.5});

  CHECK(qw::test::max_state_diff(oracle::evolve_dense(grover, start, 0), start) ==
        0.0);

  // Identity coin: after L steps every component wraps back around.
  const oracle::GlobalUnitary shift = oracle::build_global(CoinMatrix::Identity(), 5);
  CHECK(qw::test::max_state_diff(oracle::evolve_dense(shift, start, 5), start) <=
        1e-14);

  walk::LatticeState outside = walk::LatticeState::point(7, 0, {1, 0, 0, 0});
  CHECK_THROWS_AS(oracle::evolve_dense(grover, outside, 1), std::invalid_argument);
}

TEST_CASE("dense evolution preserves norm over 50 steps") {
  std::mt19937_64 rng(409);
  const oracle::GlobalUnitary u =
      oracle::build_global(qw::test::random_unitary(rng), 5);
  walk::LatticeState state = walk::LatticeState::point(2, 3, {0.5, 0.5, 0.5, 0.5});
  state = oracle::evolve_dense(u, state, 50);
  CHECK(std::abs(state.norm_squared() - 1.0) <= 1e-10);
}

TEST_CASE("sparse engine in periodic mode matches the dense oracle") {
  std::mt19937_64 rng(419);
  for (const CoinMatrix& coin_m :
       {coin::grover_coin(), coin::dft_coin(), qw::test::random_unitary(rng)}) {
    walk::WalkConfig cfg;
    cfg.coin = coin_m;
    cfg.periodic = 9;
    cfg.steps = 10;
    cfg.initial = walk::LatticeState::point(0, 0, {0.5, 0.5, 0.5, 0.5});
    const walk::LatticeState sparse = walk::evolve(cfg);

    const oracle::GlobalUnitary u = oracle::build_global(coin_m, 9);
    const walk::LatticeState dense = oracle::evolve_dense(u, cfg.initial, 10);
    CHECK(qw::test::max_state_diff(sparse, dense) <= 1e-10);
  }
}

TEST_CASE("30-step grover evolution matches the dense oracle") {
  walk::WalkConfig cfg;
  cfg.coin = coin::grover_coin();
  cfg.periodic = 11;
  cfg.steps = 30;
  cfg.initial = walk::LatticeState::point(5, 5, {0.5, 0.5, 0.5, 0.5});
  const walk::LatticeState sparse = walk::evolve(cfg);

  const oracle::GlobalUnitary u = oracle::build_global(coin::grover_coin(), 11);
  const walk::LatticeState dense = oracle::evolve_dense(u, cfg.initial, 30);
  CHECK(qw::test::max_state_diff(sparse, dense) <= 1e-10);
}
