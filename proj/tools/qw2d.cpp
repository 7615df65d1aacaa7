// qw2d: simulate the two-dimensional coined quantum walk, synthesize and fit
// the five-stage optical decomposition of its 4x4 coins, and model the
// frequency-spectrum readout.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qw/coin.hpp"
#include "qw/fit.hpp"
#include "qw/io.hpp"
#include "qw/spectral.hpp"
#include "qw/walk.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Exit codes: 0 success, 1 invalid configuration or usage, 2 data error
// (unreadable/ill-formed file, non-unitary input, frequency collision),
// 3 fit did not reach the target, 4 verification found a deviation.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitNotReachable = 3;
constexpr int kExitVerifyFailed = 4;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string coin = "grover";  // preset name; empty when a file source is set
  std::string coin_matrix;      // 4x4 matrix file
  std::string coin_params;      // optical parameter file
  int steps = 10;
  std::string initial = "symmetric";  // preset or state file path
  std::string mode = "plane";
  bool permute_lu = false;
  int periodic = 0;  // 0 = unbounded lattice
  std::string omega_0 = "0";
  std::string omega_x = "1";
  std::string omega_y = "1000000";
  std::vector<std::string> emit = {"probability"};
  std::string out_dir = "out";
  std::uint64_t seed = 12345;
  bool spectrum_exact = false;
};

json config_to_json(const ExperimentConfig& c) {
  return json{{"coin", c.coin},
              {"coin_matrix", c.coin_matrix},
              {"coin_params", c.coin_params},
              {"steps", c.steps},
              {"initial", c.initial},
              {"mode", c.mode},
              {"permute_lu", c.permute_lu},
              {"periodic", c.periodic},
              {"omega_0", c.omega_0},
              {"omega_x", c.omega_x},
              {"omega_y", c.omega_y},
              {"emit", c.emit},
              {"out_dir", c.out_dir},
              {"seed", c.seed},
              {"spectrum_exact", c.spectrum_exact}};
}

void apply_config_file(ExperimentConfig& c, const std::string& path) {
  json doc;
  try {
    doc = json::parse(qw::io::load_text(path));
  } catch (const json::exception& e) {
    throw DataError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw DataError("config file must hold a JSON object");

  const auto read = [&](const char* key, auto& slot) {
    if (const auto it = doc.find(key); it != doc.end()) {
      try {
        it->get_to(slot);
      } catch (const json::exception&) {
        throw std::invalid_argument(std::string("config key '") + key +
                                    "' has the wrong type");
      }
      doc.erase(it);
    }
  };
  read("coin", c.coin);
  read("coin_matrix", c.coin_matrix);
  read("coin_params", c.coin_params);
  read("steps", c.steps);
  read("initial", c.initial);
  read("mode", c.mode);
  read("permute_lu", c.permute_lu);
  read("periodic", c.periodic);
  read("omega_0", c.omega_0);
  read("omega_x", c.omega_x);
  read("omega_y", c.omega_y);
  read("emit", c.emit);
  read("out_dir", c.out_dir);
  read("seed", c.seed);
  read("spectrum_exact", c.spectrum_exact);
  if (!doc.empty()) {
    throw std::invalid_argument("unknown config key '" + doc.begin().key() +
                                "'");
  }
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (const unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

qw::CoinMatrix preset_coin(const std::string& name) {
  if (name == "grover") return qw::coin::grover_coin();
  if (name == "dft") return qw::coin::dft_coin();
  if (name == "dft-prime") return qw::coin::dft_prime_coin();
  throw std::invalid_argument("unknown coin preset '" + name +
                              "' (expected grover, dft or dft-prime)");
}

qw::CoinMatrix load_matrix_file(const std::string& path) {
  std::istringstream is(qw::io::load_text(path));
  try {
    return qw::io::read_matrix(is);
  } catch (const std::exception& e) {
    throw DataError("matrix file '" + path + "': " + e.what());
  }
}

qw::coin::OpticalCoinParams load_params_file(const std::string& path) {
  std::istringstream is(qw::io::load_text(path));
  try {
    return qw::io::read_params(is);
  } catch (const std::exception& e) {
    throw DataError("parameter file '" + path + "': " + e.what());
  }
}

qw::CoinMatrix resolve_coin(const ExperimentConfig& c) {
  int sources = 0;
  if (!c.coin.empty()) ++sources;
  if (!c.coin_matrix.empty()) ++sources;
  if (!c.coin_params.empty()) ++sources;
  if (sources != 1) {
    throw std::invalid_argument(
        "exactly one of the keys coin, coin_matrix, coin_params must be set");
  }

  qw::CoinMatrix m;
  if (!c.coin.empty()) {
    m = preset_coin(c.coin);
  } else if (!c.coin_matrix.empty()) {
    m = load_matrix_file(c.coin_matrix);
    if (!qw::is_unitary(m)) {
      throw DataError("coin_matrix '" + c.coin_matrix +
                      "' is not unitary (defect " +
                      qw::io::format_double(qw::unitarity_defect(m)) + ")");
    }
  } else {
    m = qw::coin::synthesize_coin(load_params_file(c.coin_params));
  }
  if (c.permute_lu) m = qw::coin::permute_lu(m);
  return m;
}

qw::walk::LatticeState resolve_initial(const ExperimentConfig& c) {
  if (c.initial == "symmetric") return qw::walk::symmetric_origin_state();
  const std::map<std::string, int> components{
      {"r", qw::kRight}, {"l", qw::kLeft}, {"u", qw::kUp}, {"d", qw::kDown}};
  if (const auto it = components.find(c.initial); it != components.end()) {
    qw::walk::Amplitudes a{};
    a[it->second] = 1.0;
    return qw::walk::LatticeState::point(0, 0, a);
  }
  std::istringstream is(qw::io::load_text(c.initial));
  try {
    return qw::io::read_state(is).state;
  } catch (const std::exception& e) {
    throw DataError("initial state file '" + c.initial + "': " + e.what());
  }
}

qw::spectral::EncodingConfig resolve_encoding(const ExperimentConfig& c) {
  qw::spectral::EncodingConfig cfg;
  const auto parse = [](const char* key, const std::string& text) {
    try {
      return qw::spectral::Frequency::parse(text);
    } catch (const std::exception& e) {
      throw std::invalid_argument(std::string("config key '") + key + "': " +
                                  e.what());
    }
  };
  cfg.omega0 = parse("omega_0", c.omega_0);
  cfg.omega_x = parse("omega_x", c.omega_x);
  cfg.omega_y = parse("omega_y", c.omega_y);
  return cfg;
}

json tolerance_block() {
  return json{{"coin_unitarity", qw::kCoinUnitarityTol},
              {"state_norm", qw::walk::kNormTol},
              {"prune_threshold", qw::walk::kPruneThreshold},
              {"collision_rel_tol", qw::spectral::kCollisionRelTol},
              {"fit_target_unitarity", qw::coin::kFitTargetUnitarityTol}};
}

int run_experiment(const ExperimentConfig& cfg,
                   const std::string& verify_coin) {
  static const std::set<std::string> kKnownEmits{
      "state", "probability", "marginals", "slices",
      "spectrum", "moments", "coin"};
  for (const auto& item : cfg.emit) {
    if (!kKnownEmits.count(item)) {
      throw std::invalid_argument("unknown emit entry '" + item + "'");
    }
  }
  if (cfg.steps < 0) {
    throw std::invalid_argument("config key 'steps' must be >= 0");
  }
  if (cfg.periodic < 0) {
    throw std::invalid_argument("config key 'periodic' must be >= 0");
  }

  const qw::CoinMatrix coin_m = resolve_coin(cfg);

  if (!verify_coin.empty()) {
    qw::CoinMatrix target;
    if (verify_coin == "grover" || verify_coin == "dft" ||
        verify_coin == "dft-prime") {
      target = preset_coin(verify_coin);
    } else {
      target = load_matrix_file(verify_coin);
    }
    const double dev = qw::max_entry_diff(coin_m, target);
    std::cout << "verify-coin max deviation from " << verify_coin << ": "
              << qw::io::format_double(dev) << '\n';
    if (dev > 1e-12) {
      std::cerr << "error: coin deviates from '" << verify_coin
                << "' beyond 1e-12\n";
      return kExitVerifyFailed;
    }
  }

  qw::walk::WalkConfig wcfg;
  wcfg.coin = coin_m;
  wcfg.steps = cfg.steps;
  wcfg.initial = resolve_initial(cfg);
  wcfg.mode = qw::io::parse_mode(cfg.mode);
  if (cfg.periodic > 0) wcfg.periodic = cfg.periodic;

  const qw::walk::LatticeState final_state = qw::walk::evolve(wcfg);
  const qw::walk::ProbabilityField field = qw::walk::probability(final_state);
  const qw::walk::Moments mom = qw::walk::moments(field);

  fs::create_directories(cfg.out_dir);
  std::vector<std::string> outputs;
  const auto save = [&](const std::string& name, const std::string& content) {
    qw::io::save_text((fs::path(cfg.out_dir) / name).string(), content);
    outputs.push_back(name);
  };

  for (const auto& item : cfg.emit) {
    if (item == "state") {
      std::ostringstream os;
      qw::io::write_state(os, final_state, wcfg.mode);
      save("state.txt", os.str());
    } else if (item == "probability") {
      std::ostringstream os;
      qw::io::write_probability_csv(os, field);
      save("probability.csv", os.str());
    } else if (item == "marginals") {
      const qw::walk::Marginals m = qw::walk::marginals(field);
      std::ostringstream ox, oy;
      qw::io::write_axis_csv(ox, m.x, "x");
      qw::io::write_axis_csv(oy, m.y, "y");
      save("marginal_x.csv", ox.str());
      save("marginal_y.csv", oy.str());
    } else if (item == "slices") {
      const qw::walk::Slices s = qw::walk::slices(field);
      std::ostringstream ox, oy;
      qw::io::write_axis_csv(ox, s.x_axis, "x");
      qw::io::write_axis_csv(oy, s.y_axis, "y");
      save("slice_x.csv", ox.str());
      save("slice_y.csv", oy.str());
    } else if (item == "moments") {
      std::ostringstream os;
      qw::io::write_moments_csv(os, mom);
      save("moments.csv", os.str());
    } else if (item == "coin") {
      std::ostringstream os;
      qw::io::write_matrix(os, coin_m);  // the active coin, permutation applied
      save("coin.json", os.str());
    } else {  // spectrum
      const qw::spectral::EncodingConfig enc = resolve_encoding(cfg);
      const qw::spectral::SpectrumModel model =
          qw::spectral::encode(final_state, enc);
      if (cfg.spectrum_exact && !model.exact) {
        throw std::invalid_argument(
            "spectrum_exact requires omega_0, omega_x, omega_y to be exact "
            "rationals");
      }
      std::ostringstream os;
      qw::io::write_spectrum_csv(os, model, cfg.spectrum_exact);
      save("spectrum.csv", os.str());
    }
  }

  const json config_echo = config_to_json(cfg);
  json manifest{
      {"config", config_echo},
      {"config_hash", hex64(fnv1a64(config_echo.dump()))},
      {"outputs", outputs},
      {"summary",
       {{"steps", final_state.step_count()},
        {"support_sites", final_state.size()},
        {"norm", std::sqrt(final_state.norm_squared())},
        {"mean_x", mom.mean_x},
        {"mean_y", mom.mean_y},
        {"sigma", mom.sigma}}},
      {"tolerances", tolerance_block()}};
  qw::io::save_text((fs::path(cfg.out_dir) / "manifest.json").string(),
                    manifest.dump(2) + "\n");

  std::cout << "steps: " << final_state.step_count() << '\n'
            << "support sites: " << final_state.size() << '\n'
            << "norm: "
            << qw::io::format_double(std::sqrt(final_state.norm_squared()))
            << '\n'
            << "sigma: " << qw::io::format_double(mom.sigma) << " (sigma_x "
            << qw::io::format_double(mom.sigma_x) << ", sigma_y "
            << qw::io::format_double(mom.sigma_y) << ")\n"
            << "outputs: " << cfg.out_dir << " (" << outputs.size()
            << " files + manifest.json)\n";
  return kExitOk;
}

int run_fit(const std::string& target_path, const std::string& out_path,
            const qw::coin::FitConfig& fit_cfg) {
  const qw::CoinMatrix target = load_matrix_file(target_path);
  if (qw::unitarity_defect(target) > qw::coin::kFitTargetUnitarityTol) {
    throw DataError("fit target is not unitary (defect " +
                    qw::io::format_double(qw::unitarity_defect(target)) + ")");
  }

  const qw::coin::FitResult result = qw::coin::fit_params(target, fit_cfg);

  std::ostringstream os;
  qw::io::write_params(os, result.params);
  qw::io::save_text(out_path, os.str());

  std::cout << "residual: " << qw::io::format_double(result.residual) << '\n'
            << "converged: " << (result.converged ? "yes" : "no") << '\n'
            << "best start: " << result.best_start << '\n'
            << "params written to: " << out_path << '\n';
  return result.converged ? kExitOk : kExitNotReachable;
}

int run_verify_presets() {
  struct Check {
    std::string name;
    double deviation;
    double tolerance;
  };
  std::vector<Check> checks;

  checks.push_back({"synthesize(grover preset) vs grover coin",
                    qw::max_entry_diff(
                        qw::coin::synthesize_coin(qw::coin::grover_params()),
                        qw::coin::grover_coin()),
                    1e-12});
  checks.push_back({"closed form(grover preset) vs grover coin",
                    qw::max_entry_diff(
                        qw::coin::closed_form_coin(qw::coin::grover_params()),
                        qw::coin::grover_coin()),
                    1e-12});
  checks.push_back({"synthesize(dft preset) vs dft-prime coin",
                    qw::max_entry_diff(
                        qw::coin::synthesize_coin(qw::coin::dft_params()),
                        qw::coin::dft_prime_coin()),
                    1e-12});
  checks.push_back({"permute_lu(dft-prime coin) vs dft coin",
                    qw::max_entry_diff(
                        qw::coin::permute_lu(qw::coin::dft_prime_coin()),
                        qw::coin::dft_coin()),
                    0.0});

  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi / 2);
  std::uniform_real_distribution<double> phase(-std::numbers::pi,
                                               std::numbers::pi);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    qw::coin::OpticalCoinParams p;
    for (auto& th : p.theta) th = angle(rng);
    for (auto& stage : p.phi) {
      for (auto& v : stage) v = phase(rng);
    }
    worst = std::max(worst, qw::max_entry_diff(qw::coin::closed_form_coin(p),
                                               qw::coin::synthesize_coin(p)));
  }
  checks.push_back(
      {"closed form vs product on 200 random draws", worst, 1e-12});

  bool all_ok = true;
  for (const auto& check : checks) {
    const bool ok = check.deviation <= check.tolerance;
    all_ok = all_ok && ok;
    std::cout << (ok ? "PASS" : "FAIL") << "  " << check.name
              << "  (max deviation " << qw::io::format_double(check.deviation)
              << ", tolerance " << qw::io::format_double(check.tolerance)
              << ")\n";
  }
  return all_ok ? kExitOk : kExitVerifyFailed;
}

int run_detect_collisions(const std::string& omega_x,
                          const std::string& omega_y,
                          const std::string& omega_0, int extent,
                          std::size_t max_print) {
  ExperimentConfig cfg;
  cfg.omega_x = omega_x;
  cfg.omega_y = omega_y;
  cfg.omega_0 = omega_0;
  const qw::spectral::EncodingConfig enc = resolve_encoding(cfg);
  const std::vector<qw::spectral::SitePair> pairs =
      qw::spectral::detect_collisions(enc, extent);

  std::cout << "colliding pairs within extent " << extent << ": "
            << pairs.size() << '\n';
  for (std::size_t i = 0; i < pairs.size() && i < max_print; ++i) {
    const auto& p = pairs[i];
    std::cout << "  (" << p.x1 << "," << p.y1 << ") ~ (" << p.x2 << "," << p.y2
              << ")\n";
  }
  if (pairs.size() > max_print) {
    std::cout << "  ... " << pairs.size() - max_print << " more\n";
  }
  return pairs.empty() ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qw2d: two-dimensional coined quantum walk simulator with optical coin "
      "synthesis and spectral readout"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string config_path, verify_coin;
  std::optional<std::string> coin_flag, coin_matrix_flag, coin_params_flag,
      initial_flag, mode_flag, omega0_flag, omegax_flag, omegay_flag,
      out_dir_flag;
  std::optional<int> steps_flag, periodic_flag;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::vector<std::string>> emit_flag;
  bool permute_flag = false, spectrum_exact_flag = false;

  CLI::App* run =
      app.add_subcommand("run", "evolve a walk and write the requested outputs");
  run->add_option("--config", config_path, "JSON config file; flags override");
  run->add_option("--coin", coin_flag, "coin preset: grover, dft, dft-prime");
  run->add_option("--coin-matrix", coin_matrix_flag, "4x4 matrix file");
  run->add_option("--coin-params", coin_params_flag,
                  "optical parameter file (synthesized)");
  run->add_option("--steps", steps_flag, "number of walk steps");
  run->add_option("--mode", mode_flag, "plane or line-two-coins");
  run->add_option("--initial", initial_flag,
                  "symmetric, r, l, u, d, or a state file");
  run->add_option("--omega-0", omega0_flag, "carrier frequency");
  run->add_option("--omega-x", omegax_flag, "x shift quantum");
  run->add_option("--omega-y", omegay_flag, "y shift quantum");
  run->add_option("--out-dir", out_dir_flag, "output directory");
  run->add_option("--emit", emit_flag,
                  "comma list of state,probability,marginals,slices,spectrum,"
                  "moments,coin")
      ->delimiter(',');
  run->add_flag("--permute-lu", permute_flag,
                "conjugate the coin by the l/u beam swap");
  run->add_option("--seed", seed_flag, "random seed recorded in the manifest");
  run->add_option("--periodic", periodic_flag, "L: wrap on an L x L torus");
  run->add_flag("--spectrum-exact", spectrum_exact_flag,
                "write spectrum frequencies as exact rationals");
  run->add_option("--verify-coin", verify_coin,
                  "print max deviation of the active coin from a preset or "
                  "matrix file");

  std::string fit_target, fit_out = "fitted_params.txt";
  qw::coin::FitConfig fit_cfg;
  CLI::App* fit = app.add_subcommand(
      "fit", "fit optical stage parameters to a unitary target matrix");
  fit->add_option("--target", fit_target, "4x4 target matrix file")->required();
  fit->add_option("--out", fit_out, "output parameter file");
  fit->add_option("--starts", fit_cfg.starts, "random multi-starts");
  fit->add_option("--iterations", fit_cfg.max_iterations,
                  "iteration cap per start");
  fit->add_option("--threshold", fit_cfg.success_threshold,
                  "residual declared converged");
  fit->add_option("--seed", fit_cfg.seed, "multi-start seed");

  app.add_subcommand("verify-presets",
                     "check the built-in parameter sets against their coins");

  std::string dc_omega_x, dc_omega_y, dc_omega_0 = "0";
  int dc_extent = 0;
  std::size_t dc_max_print = 20;
  CLI::App* detect = app.add_subcommand("detect-collisions",
                                        "list frequency-degenerate site pairs");
  detect->add_option("--omega-x", dc_omega_x, "x shift quantum")->required();
  detect->add_option("--omega-y", dc_omega_y, "y shift quantum")->required();
  detect->add_option("--omega-0", dc_omega_0,
                     "carrier (unused for collisions)");
  detect->add_option("--extent", dc_extent, "max |x|, |y| to scan")->required();
  detect->add_option("--max-print", dc_max_print, "pairs to print");

  app.add_subcommand("defaults", "print the default run config as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand("defaults")) {
      std::cout << config_to_json(ExperimentConfig{}).dump(2) << '\n';
      return kExitOk;
    }
    if (app.got_subcommand("verify-presets")) {
      return run_verify_presets();
    }
    if (app.got_subcommand("detect-collisions")) {
      return run_detect_collisions(dc_omega_x, dc_omega_y, dc_omega_0,
                                   dc_extent, dc_max_print);
    }
    if (app.got_subcommand("fit")) {
      return run_fit(fit_target, fit_out, fit_cfg);
    }

    // run: defaults, then config file, then flag overrides.
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    const auto override_str = [](std::optional<std::string>& flag,
                                 std::string& slot) {
      if (flag) slot = *flag;
    };
    if (coin_flag || coin_matrix_flag || coin_params_flag) {
      // A coin source on the command line replaces the file's choice.
      cfg.coin.clear();
      cfg.coin_matrix.clear();
      cfg.coin_params.clear();
    }
    override_str(coin_flag, cfg.coin);
    override_str(coin_matrix_flag, cfg.coin_matrix);
    override_str(coin_params_flag, cfg.coin_params);
    override_str(initial_flag, cfg.initial);
    override_str(mode_flag, cfg.mode);
    override_str(omega0_flag, cfg.omega_0);
    override_str(omegax_flag, cfg.omega_x);
    override_str(omegay_flag, cfg.omega_y);
    override_str(out_dir_flag, cfg.out_dir);
    if (steps_flag) cfg.steps = *steps_flag;
    if (periodic_flag) cfg.periodic = *periodic_flag;
    if (seed_flag) cfg.seed = *seed_flag;
    if (emit_flag) cfg.emit = *emit_flag;
    if (permute_flag) cfg.permute_lu = true;
    if (spectrum_exact_flag) cfg.spectrum_exact = true;

    return run_experiment(cfg, verify_coin);
  } catch (const qw::spectral::CollisionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
