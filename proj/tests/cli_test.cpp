#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qw/io.hpp"

// Drives the installed binary end to end. QW_CLI_PATH is injected by CMake.

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() /
                 ("qw_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  const fs::path out = scratch_dir() / "stdout.txt";
  const fs::path err = scratch_dir() / "stderr.txt";
  const std::string cmd = std::string(QW_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = qw::io::load_text(out.string());
  r.err = qw::io::load_text(err.string());
  return r;
}

std::string slurp(const fs::path& p) { return qw::io::load_text(p.string()); }

}  // namespace

TEST_CASE("verify-presets passes") {
  const CliResult r = run_cli("verify-presets");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS") != std::string::npos);
}

TEST_CASE("defaults prints the config document") {
  const CliResult r = run_cli("defaults");
  CHECK(r.exit_code == 0);
  for (const char* key : {"\"coin\"", "\"steps\"", "\"omega_x\"", "\"seed\"",
                          "\"emit\"", "\"out_dir\"", "\"mode\""}) {
    CHECK(r.out.find(key) != std::string::npos);
  }
}

TEST_CASE("identical configs produce byte-identical outputs") {
  const fs::path dir_a = scratch_dir() / "det_a";
  const fs::path dir_b = scratch_dir() / "det_b";
  const std::string common =
      "run --coin grover --steps 12 --seed 7 --emit "
      "state,probability,marginals,slices,moments,spectrum --omega-x 1 "
      "--omega-y 1000000 ";
  CHECK(run_cli(common + "--out-dir " + dir_a.string()).exit_code == 0);
  CHECK(run_cli(common + "--out-dir " + dir_b.string()).exit_code == 0);

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir_a)) {
    names.push_back(entry.path().filename().string());
  }
  CHECK(names.size() == 9);  // 8 outputs + manifest
  for (const auto& name : names) {
    INFO("file: ", name);
    const std::string a = slurp(dir_a / name);
    CHECK(!a.empty());
    // The config echo embeds out_dir, so the manifest differs by exactly that
    // path; every data file must match byte for byte.
    if (name != "manifest.json") {
      CHECK(a == slurp(dir_b / name));
    }
  }

  // Same out_dir run twice: manifest included, everything byte-identical.
  const fs::path dir_c = scratch_dir() / "det_c";
  CHECK(run_cli(common + "--out-dir " + dir_c.string()).exit_code == 0);
  std::vector<std::pair<std::string, std::string>> first_pass;
  for (const auto& entry : fs::directory_iterator(dir_c)) {
    first_pass.emplace_back(entry.path().filename().string(),
                            slurp(entry.path()));
  }
  CHECK(run_cli(common + "--out-dir " + dir_c.string()).exit_code == 0);
  for (const auto& [name, content] : first_pass) {
    CHECK(slurp(dir_c / name) == content);
  }
}

TEST_CASE("zero steps emits the initial distribution") {
  const fs::path dir = scratch_dir() / "zero";
  CHECK(run_cli("run --coin grover --steps 0 --emit probability --out-dir " +
                dir.string())
            .exit_code == 0);
  std::ifstream is(dir / "probability.csv");
  const qw::walk::ProbabilityField f = qw::io::read_probability_csv(is);
  REQUIRE(f.records.size() == 1);
  CHECK(f.records[0].x == 0);
  CHECK(f.records[0].y == 0);
  CHECK(f.records[0].pr == 0.25);
  CHECK(f.records[0].pl == 0.25);
  CHECK(f.records[0].pu == 0.25);
  CHECK(f.records[0].pd == 0.25);
  CHECK(f.records[0].p == 1.0);
}

TEST_CASE("emitted probability csv re-ingests and stays normalized") {
  const fs::path dir = scratch_dir() / "prob";
  CHECK(run_cli("run --coin dft --steps 9 --emit probability --out-dir " +
                dir.string())
            .exit_code == 0);
  std::ifstream is(dir / "probability.csv");
  const qw::walk::ProbabilityField f = qw::io::read_probability_csv(is);
  CHECK(std::abs(f.total - 1.0) <= 1e-10);
  for (const auto& r : f.records) {
    CHECK(r.p >= 0.0);
    CHECK(r.p <= 1.0);
    CHECK(std::abs(r.p - (r.pr + r.pl + r.pu + r.pd)) <= 1e-15);
  }
}

TEST_CASE("emitted state file re-ingests as a normalized state") {
  const fs::path dir = scratch_dir() / "state";
  CHECK(run_cli("run --coin grover --steps 7 --emit state --out-dir " +
                dir.string())
            .exit_code == 0);
  std::ifstream is(dir / "state.txt");
  const qw::io::StateFile sf = qw::io::read_state(is);
  CHECK(sf.state.step_count() == 7);
  CHECK(std::abs(sf.state.norm_squared() - 1.0) <= 1e-10);
}

TEST_CASE("config file drives the run and flags override it") {
  const fs::path dir = scratch_dir() / "cfgrun";
  const fs::path cfg_path = scratch_dir() / "config.json";
  {
    std::ofstream os(cfg_path);
    os << R"({"coin": "dft", "steps": 3, "emit": ["moments"], "out_dir": ")"
       << dir.string() << R"("})";
  }
  CHECK(run_cli("run --config " + cfg_path.string()).exit_code == 0);
  CHECK(fs::exists(dir / "moments.csv"));

  // Flag wins over the file value.
  const CliResult r = run_cli("run --config " + cfg_path.string() +
                              " --steps 5 --emit probability");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("steps: 5") != std::string::npos);
  CHECK(fs::exists(dir / "probability.csv"));
}

TEST_CASE("invalid configs fail with a diagnostic naming the offending key") {
  const fs::path cfg_path = scratch_dir() / "bad.json";
  {
    std::ofstream os(cfg_path);
    os << R"({"coinn": "grover"})";
  }
  const CliResult unknown = run_cli("run --config " + cfg_path.string());
  CHECK(unknown.exit_code == 1);
  CHECK(unknown.err.find("coinn") != std::string::npos);

  const CliResult bad_steps = run_cli("run --coin grover --steps -4");
  CHECK(bad_steps.exit_code == 1);
  CHECK(bad_steps.err.find("steps") != std::string::npos);

  const CliResult bad_emit = run_cli("run --coin grover --emit probabilty");
  CHECK(bad_emit.exit_code == 1);
  CHECK(bad_emit.err.find("probabilty") != std::string::npos);

  const CliResult bad_preset = run_cli("run --coin groover");
  CHECK(bad_preset.exit_code == 1);
  CHECK(bad_preset.err.find("groover") != std::string::npos);
}

TEST_CASE("degenerate encoding fails with the colliding sites listed") {
  const fs::path dir = scratch_dir() / "collide";
  const CliResult r = run_cli(
      "run --coin grover --steps 4 --emit spectrum --omega-x 1 --omega-y 1 "
      "--out-dir " +
      dir.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("collision") != std::string::npos);
  CHECK(r.err.find("(") != std::string::npos);  // at least one site pair
}

TEST_CASE("fit round-trips a synthesized coin through files") {
  const fs::path params_in = scratch_dir() / "params_in.txt";
  const fs::path matrix_path = scratch_dir() / "target.json";
  const fs::path params_out = scratch_dir() / "params_out.txt";

  // A handful of interesting parameters, written through the library.
  qw::coin::OpticalCoinParams p = qw::coin::dft_params();
  p.phi[0][2] = 0.3125;
  p.theta[1] = 0.7;
  {
    std::ofstream os(params_in);
    qw::io::write_params(os, p);
    std::ofstream om(matrix_path);
    qw::io::write_matrix(om, qw::coin::synthesize_coin(p));
  }

  const CliResult fit = run_cli("fit --target " + matrix_path.string() +
                                " --out " + params_out.string());
  CHECK(fit.exit_code == 0);
  CHECK(fit.out.find("converged: yes") != std::string::npos);

  std::ifstream is(params_out);
  const qw::coin::OpticalCoinParams fitted = qw::io::read_params(is);
  CHECK(qw::coin::equal_up_to_global_phase(
      qw::coin::synthesize_coin(fitted), qw::coin::synthesize_coin(p), 1e-8));
}

TEST_CASE("fit rejects a non-unitary target with a diagnostic") {
  const fs::path matrix_path = scratch_dir() / "bad_matrix.json";
  {
    std::ofstream os(matrix_path);
    qw::CoinMatrix m = qw::coin::grover_coin();
    m(0, 0) += 0.05;
    qw::io::write_matrix(os, m);
  }
  const CliResult r = run_cli("fit --target " + matrix_path.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("unitary") != std::string::npos);
}

TEST_CASE("detect-collisions reports pairs and exit status") {
  const CliResult degenerate =
      run_cli("detect-collisions --omega-x 1 --omega-y 1 --extent 1");
  CHECK(degenerate.exit_code == 2);
  CHECK(degenerate.out.find("(1,0) ~ (0,1)") != std::string::npos);

  const CliResult clean =
      run_cli("detect-collisions --omega-x 1 --omega-y 1000 --extent 400");
  CHECK(clean.exit_code == 0);
  CHECK(clean.out.find(": 0") != std::string::npos);
}

TEST_CASE("permuted dft-prime preset verifies and dumps as the dft coin") {
  const fs::path dir = scratch_dir() / "permute";
  const CliResult r = run_cli(
      "run --coin dft-prime --permute-lu --steps 0 --emit state,coin "
      "--verify-coin dft --out-dir " +
      dir.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("verify-coin max deviation from dft: 0") !=
        std::string::npos);

  std::ifstream is(dir / "coin.json");
  const qw::CoinMatrix dumped = qw::io::read_matrix(is);
  CHECK(qw::max_entry_diff(dumped, qw::coin::dft_coin()) == 0.0);
}
