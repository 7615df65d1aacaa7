#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qw/coin.hpp"
#include "qw/spectral.hpp"
#include "qw/walk.hpp"

namespace qw::io {

// Shortest text form that round-trips a double exactly (17 significant digits).
std::string format_double(double v);

// Optical parameters as a flat key-value document: keys theta11..theta22 and
// phi11..phi34, radians. Readers accept "key value" and "key = value" lines
// and reject unknown or missing keys by name.
void write_params(std::ostream& os, const coin::OpticalCoinParams& p);
coin::OpticalCoinParams read_params(std::istream& is);

// 4x4 matrix as a JSON array of rows of [re, im] pairs.
void write_matrix(std::ostream& os, const CoinMatrix& m);
CoinMatrix read_matrix(std::istream& is);

std::string mode_name(walk::Mode mode);
walk::Mode parse_mode(const std::string& name);

// Line-oriented state file. Header: "step <n> mode <plane|line-two-coins>";
// one record per site: x y then re/im of r, l, u, d.
void write_state(std::ostream& os, const walk::LatticeState& s,
                 walk::Mode mode);
struct StateFile {
  walk::LatticeState state;
  walk::Mode mode = walk::Mode::kPlane;
};
StateFile read_state(std::istream& is);

// CSV with header x,y,pr,pl,pu,pd,p.
void write_probability_csv(std::ostream& os, const walk::ProbabilityField& f);
walk::ProbabilityField read_probability_csv(std::istream& is);

// CSV with header "<axis>,p", axis in {"x", "y"}.
void write_axis_csv(std::ostream& os, const std::vector<walk::AxisMass>& m,
                    const std::string& axis);

// Single-row CSV with header mean_x,mean_y,sigma_x,sigma_y,sigma.
void write_moments_csv(std::ostream& os, const walk::Moments& m);

// CSV polarization,frequency,intensity; exact_frequencies switches the
// frequency column to numerator/denominator form (exact spectra only).
void write_spectrum_csv(std::ostream& os, const spectral::SpectrumModel& s,
                        bool exact_frequencies = false);

// File-path convenience wrappers; throw std::runtime_error on IO failure.
void save_text(const std::string& path, const std::string& content);
std::string load_text(const std::string& path);

}  // namespace qw::io
