#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qw/walk.hpp"

namespace qw::spectral {

// Exact rational with int64 numerator and positive denominator, always
// reduced. Comparisons cross-multiply in 128-bit, so they never overflow.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / den_; }
  std::string str() const;

  Rational scaled(std::int64_t k) const;  // k * this

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b);
  friend bool operator<(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// A frequency carried either as an exact rational or as a decimal value.
// Integer and p/q text parses as exact; anything with a decimal point or
// exponent stays inexact.
class Frequency {
 public:
  Frequency() = default;
  static Frequency rational(std::int64_t num, std::int64_t den);
  static Frequency decimal(double value);
  static Frequency parse(const std::string& text);

  bool exact() const { return exact_; }
  double value() const { return value_; }
  const Rational& ratio() const { return ratio_; }

 private:
  bool exact_ = false;
  Rational ratio_;
  double value_ = 0.0;
};

struct EncodingConfig {
  Frequency omega0;   // carrier
  Frequency omega_x;  // shift per unit x, must be > 0
  Frequency omega_y;  // shift per unit y, must be > 0

  bool exact() const {
    return omega0.exact() && omega_x.exact() && omega_y.exact();
  }
};

// Relative tolerance for frequency coincidence when any omega is inexact:
// two frequencies collide when they differ by at most kCollisionRelTol * omega_x.
inline constexpr double kCollisionRelTol = 1e-9;

struct SitePair {
  std::int32_t x1 = 0, y1 = 0;
  std::int32_t x2 = 0, y2 = 0;
};

class CollisionError : public std::runtime_error {
 public:
  CollisionError(const std::string& what, std::vector<SitePair> pairs);
  const std::vector<SitePair>& pairs() const { return pairs_; }

 private:
  std::vector<SitePair> pairs_;
};

enum class Polarization { kX, kY };

struct SpectralLine {
  Rational freq_exact;    // meaningful only in exact mode
  double frequency = 0.0;
  double intensity = 0.0;
};

// Per-polarization intensity spectra; lines sorted by ascending frequency.
struct SpectrumModel {
  bool exact = false;
  std::vector<SpectralLine> x_pol;  // coin components r, l
  std::vector<SpectralLine> y_pol;  // coin components u, d
};

struct PolarizedSpectrum {
  Polarization pol = Polarization::kX;
  bool exact = false;
  std::vector<SpectralLine> lines;
};

// Site (x, y) contributes |r|^2 + |l|^2 at omega0 + x*omega_x + y*omega_y to
// the x polarization and |u|^2 + |d|^2 to the y polarization. Throws
// CollisionError when two distinct occupied sites land on one frequency.
SpectrumModel encode(const walk::LatticeState& s, const EncodingConfig& cfg);

// All unordered site pairs within |x|,|y| <= extent sharing a frequency.
// Exact configs use integer arithmetic; inexact ones the relative tolerance.
std::vector<SitePair> detect_collisions(const EncodingConfig& cfg, int extent);

// 0 degrees selects the x polarization, 90 the y polarization; any other
// angle throws std::invalid_argument.
PolarizedSpectrum polarizer(const SpectrumModel& spectrum, int angle_degrees);

enum class DecodeAxis { kXAxis, kYAxis, kPlane };

struct DecodedSite {
  std::int32_t x = 0;
  std::int32_t y = 0;
  double intensity = 0.0;
};

// Inverts the affine frequency map. Axis modes assume support on y = 0
// (kXAxis) or x = 0 (kYAxis); kPlane solves x*omega_x + y*omega_y = delta
// over |x|,|y| <= extent, which is unique iff the config is collision-free
// there. Ambiguous lines raise CollisionError; lines off the lattice raise
// std::invalid_argument.
std::vector<DecodedSite> decode(const PolarizedSpectrum& ps,
                                const EncodingConfig& cfg, DecodeAxis axis,
                                int extent);

}  // namespace qw::spectral
