// Benchmark: sorted-array OpenMP walk kernels against the serial map-based
// reference, plus thread scaling of the engine and the fit multi-start.
// Usage: walk_bench [max_steps]   (default 200; doubles of 50 up to the cap)

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "qw/coin.hpp"
#include "qw/fit.hpp"
#include "qw/walk.hpp"
#include "qw/walk_reference.hpp"

namespace {

double seconds(const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  body();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  const int cap = argc > 1 ? std::atoi(argv[1]) : 200;
  const int threads = max_threads();

  std::printf("walk benchmark: grover coin, symmetric origin start\n");
  std::printf("engine threads available: %d\n\n", threads);
  const std::string many_label = "eng " + std::to_string(threads) + "t[s]";
  std::printf("%7s %9s %12s %12s %12s %8s %8s\n", "steps", "sites", "ref[s]",
              "eng 1t[s]", many_label.c_str(), "ref/1t", "1t/Nt");

  for (int steps = 50; steps <= cap; steps *= 2) {
    qw::walk::WalkConfig cfg;
    cfg.coin = qw::coin::grover_coin();
    cfg.initial = qw::walk::symmetric_origin_state();
    cfg.steps = steps;

    qw::walk::LatticeState result;
    set_threads(1);
    const double t_ref =
        seconds([&] { result = qw::walk::reference::evolve(cfg); });
    const double t_one = seconds([&] { result = qw::walk::evolve(cfg); });
    set_threads(threads);
    const double t_many = seconds([&] { result = qw::walk::evolve(cfg); });

    std::printf("%7d %9zu %12.4f %12.4f %12.4f %8.2f %8.2f\n", steps,
                result.size(), t_ref, t_one, t_many, t_ref / t_one,
                t_one / t_many);
  }

  std::printf("\nfit multi-start on an out-of-class target (all starts run)\n");
  qw::coin::FitConfig fit_cfg;
  fit_cfg.starts = 16;
  fit_cfg.max_iterations = 400;
  const qw::CoinMatrix target = qw::coin::dft_coin();

  qw::coin::FitResult fit_result;
  set_threads(1);
  const double t_fit_serial =
      seconds([&] { fit_result = qw::coin::fit_params(target, fit_cfg); });
  set_threads(threads);
  const double t_fit_parallel =
      seconds([&] { fit_result = qw::coin::fit_params(target, fit_cfg); });
  std::printf("serial %.3fs, %d threads %.3fs, speedup %.2f (best residual %.6f)\n",
              t_fit_serial, threads, t_fit_parallel,
              t_fit_serial / t_fit_parallel, fit_result.residual);
  return 0;
}
