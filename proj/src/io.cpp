#include "qw/io.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qw::io {

namespace {

constexpr std::array<const char*, 16> kParamKeys = {
    "theta11", "theta12", "theta21", "theta22", "phi11", "phi12",
    "phi13",   "phi14",   "phi21",   "phi22",   "phi23", "phi24",
    "phi31",   "phi32",   "phi33",   "phi34"};

double* param_slot(coin::OpticalCoinParams& p, int index) {
  return index < 4 ? &p.theta[index] : &p.phi[(index - 4) / 4][(index - 4) % 4];
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("cannot parse number '" + text + "' in " + what);
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_params(std::ostream& os, const coin::OpticalCoinParams& p) {
  coin::OpticalCoinParams copy = p;
  for (int i = 0; i < 16; ++i) {
    os << kParamKeys[i] << " = " << format_double(*param_slot(copy, i)) << '\n';
  }
}

coin::OpticalCoinParams read_params(std::istream& is) {
  std::map<std::string, double> values;
  std::string line;
  while (std::getline(is, line)) {
    std::string cleaned;
    cleaned.reserve(line.size());
    for (char ch : line) {
      if (ch != '=') cleaned.push_back(ch);
    }
    std::istringstream row(cleaned);
    std::string key, value;
    if (!(row >> key)) continue;  // blank line
    if (key.front() == '#') continue;
    if (!(row >> value)) {
      throw std::runtime_error("parameter key '" + key + "' has no value");
    }
    if (!values.emplace(key, parse_double(value, "parameter " + key)).second) {
      throw std::runtime_error("duplicate parameter key '" + key + "'");
    }
  }

  coin::OpticalCoinParams p;
  for (int i = 0; i < 16; ++i) {
    const auto it = values.find(kParamKeys[i]);
    if (it == values.end()) {
      throw std::runtime_error(std::string("missing parameter key '") +
                               kParamKeys[i] + "'");
    }
    *param_slot(p, i) = it->second;
    values.erase(it);
  }
  if (!values.empty()) {
    throw std::runtime_error("unknown parameter key '" +
                             values.begin()->first + "'");
  }
  return p;
}

void write_matrix(std::ostream& os, const CoinMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < 4; ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(row);
  }
  os << rows.dump(2) << '\n';
}

CoinMatrix read_matrix(std::istream& is) {
  nlohmann::json rows;
  try {
    is >> rows;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("matrix file is not valid JSON: ") +
                             e.what());
  }
  if (!rows.is_array() || rows.size() != 4) {
    throw std::runtime_error("matrix file must hold 4 rows");
  }
  CoinMatrix m;
  for (int i = 0; i < 4; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || row.size() != 4) {
      throw std::runtime_error("matrix row must hold 4 entries");
    }
    for (int j = 0; j < 4; ++j) {
      const auto& entry = row[j];
      if (!entry.is_array() || entry.size() != 2) {
        throw std::runtime_error("matrix entry must be an [re, im] pair");
      }
      m(i, j) = Complex(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  return m;
}

std::string mode_name(walk::Mode mode) {
  return mode == walk::Mode::kPlane ? "plane" : "line-two-coins";
}

walk::Mode parse_mode(const std::string& name) {
  if (name == "plane") return walk::Mode::kPlane;
  if (name == "line-two-coins" || name == "line") {
    return walk::Mode::kLineTwoCoins;
  }
  throw std::runtime_error("unknown mode '" + name +
                           "' (expected plane or line-two-coins)");
}

void write_state(std::ostream& os, const walk::LatticeState& s,
                 walk::Mode mode) {
  os << "step " << s.step_count() << " mode " << mode_name(mode) << '\n';
  for (const auto& site : s.sites()) {
    os << site.x << ' ' << site.y;
    for (const Complex& a : site.amp) {
      os << ' ' << format_double(a.real()) << ' ' << format_double(a.imag());
    }
    os << '\n';
  }
}

StateFile read_state(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) {
    throw std::runtime_error("state file is empty");
  }
  std::istringstream head(header);
  std::string step_word, mode_word, mode_value;
  int step_count = 0;
  if (!(head >> step_word >> step_count >> mode_word >> mode_value) ||
      step_word != "step" || mode_word != "mode") {
    throw std::runtime_error(
        "state header must read 'step <n> mode <plane|line-two-coins>'");
  }

  StateFile out;
  out.mode = parse_mode(mode_value);
  std::vector<walk::SiteAmplitude> sites;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    walk::SiteAmplitude site;
    double re = 0, im = 0;
    if (!(row >> site.x >> site.y)) {
      throw std::runtime_error("bad state record '" + line + "'");
    }
    for (int c = 0; c < 4; ++c) {
      if (!(row >> re >> im)) {
        throw std::runtime_error("state record needs 8 amplitude fields: '" +
                                 line + "'");
      }
      site.amp[c] = Complex(re, im);
    }
    sites.push_back(site);
  }
  out.state = walk::LatticeState::from_sites(std::move(sites), step_count);
  return out;
}

void write_probability_csv(std::ostream& os, const walk::ProbabilityField& f) {
  os << "x,y,pr,pl,pu,pd,p\n";
  for (const auto& r : f.records) {
    os << r.x << ',' << r.y << ',' << format_double(r.pr) << ','
       << format_double(r.pl) << ',' << format_double(r.pu) << ','
       << format_double(r.pd) << ',' << format_double(r.p) << '\n';
  }
}

walk::ProbabilityField read_probability_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "x,y,pr,pl,pu,pd,p") {
    throw std::runtime_error("probability csv must start with its header");
  }
  walk::ProbabilityField f;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::array<std::string, 7> fields;
    for (int i = 0; i < 7; ++i) {
      if (!std::getline(row, fields[i], ',')) {
        throw std::runtime_error("probability record needs 7 fields: '" +
                                 line + "'");
      }
    }
    walk::SiteProbability r;
    r.x = static_cast<std::int32_t>(
        parse_double(fields[0], "probability csv x"));
    r.y = static_cast<std::int32_t>(
        parse_double(fields[1], "probability csv y"));
    r.pr = parse_double(fields[2], "probability csv pr");
    r.pl = parse_double(fields[3], "probability csv pl");
    r.pu = parse_double(fields[4], "probability csv pu");
    r.pd = parse_double(fields[5], "probability csv pd");
    r.p = parse_double(fields[6], "probability csv p");
    f.records.push_back(r);
    f.total += r.p;
  }
  return f;
}

void write_axis_csv(std::ostream& os, const std::vector<walk::AxisMass>& m,
                    const std::string& axis) {
  os << axis << ",p\n";
  for (const auto& entry : m) {
    os << entry.coord << ',' << format_double(entry.mass) << '\n';
  }
}

void write_moments_csv(std::ostream& os, const walk::Moments& m) {
  os << "mean_x,mean_y,sigma_x,sigma_y,sigma\n";
  os << format_double(m.mean_x) << ',' << format_double(m.mean_y) << ','
     << format_double(m.sigma_x) << ',' << format_double(m.sigma_y) << ','
     << format_double(m.sigma) << '\n';
}

void write_spectrum_csv(std::ostream& os, const spectral::SpectrumModel& s,
                        bool exact_frequencies) {
  if (exact_frequencies && !s.exact) {
    throw std::runtime_error(
        "exact frequency output requires an exact spectrum");
  }
  const auto dump = [&](const char* pol,
                        const std::vector<spectral::SpectralLine>& lines) {
    for (const auto& line : lines) {
      if (exact_frequencies) {
        os << pol << ',' << line.freq_exact.num() << ','
           << line.freq_exact.den() << ',' << format_double(line.intensity)
           << '\n';
      } else {
        os << pol << ',' << format_double(line.frequency) << ','
           << format_double(line.intensity) << '\n';
      }
    }
  };
  os << (exact_frequencies ? "polarization,frequency_num,frequency_den,intensity"
                           : "polarization,frequency,intensity")
     << '\n';
  dump("x", s.x_pol);
  dump("y", s.y_pol);
}

void save_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << content;
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

std::string load_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

}  // namespace qw::io
