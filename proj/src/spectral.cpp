#include "qw/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qw::spectral {

namespace {

using Int128 = __int128;

Int128 abs128(Int128 v) { return v < 0 ? -v : v; }

Int128 gcd128(Int128 a, Int128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    const Int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t narrow(Int128 v, const char* what) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error(std::string("rational overflow in ") + what);
  }
  return static_cast<std::int64_t>(v);
}

Rational make_reduced(Int128 num, Int128 den, const char* what) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const Int128 g = num == 0 ? den : gcd128(num, den);
  return Rational(narrow(num / g, what), narrow(den / g, what));
}

void require_positive_shifts(const EncodingConfig& cfg) {
  if (!(cfg.omega_x.value() > 0.0) || !(cfg.omega_y.value() > 0.0)) {
    throw std::invalid_argument("omega_x and omega_y must be positive");
  }
}

std::string site_text(std::int32_t x, std::int32_t y) {
  return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
}

std::string collision_message(const std::vector<SitePair>& pairs) {
  std::ostringstream msg;
  msg << "frequency collision between sites:";
  const std::size_t shown = std::min<std::size_t>(pairs.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) {
    msg << ' ' << site_text(pairs[i].x1, pairs[i].y1) << "~"
        << site_text(pairs[i].x2, pairs[i].y2);
  }
  if (pairs.size() > shown) {
    msg << " and " << pairs.size() - shown << " more";
  }
  return msg.str();
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = num == 0 ? den : std::gcd(std::abs(num), den);
  num_ = num / g;
  den_ = den / g;
}

std::string Rational::str() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::scaled(std::int64_t k) const {
  return make_reduced(static_cast<Int128>(num_) * k, den_, "scale");
}

Rational operator+(const Rational& a, const Rational& b) {
  return make_reduced(static_cast<Int128>(a.num_) * b.den_ +
                          static_cast<Int128>(b.num_) * a.den_,
                      static_cast<Int128>(a.den_) * b.den_, "add");
}

Rational operator-(const Rational& a, const Rational& b) {
  return make_reduced(static_cast<Int128>(a.num_) * b.den_ -
                          static_cast<Int128>(b.num_) * a.den_,
                      static_cast<Int128>(a.den_) * b.den_, "subtract");
}

bool operator==(const Rational& a, const Rational& b) {
  return a.num_ == b.num_ && a.den_ == b.den_;
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<Int128>(a.num_) * b.den_ <
         static_cast<Int128>(b.num_) * a.den_;
}

Frequency Frequency::rational(std::int64_t num, std::int64_t den) {
  Frequency f;
  f.exact_ = true;
  f.ratio_ = Rational(num, den);
  f.value_ = f.ratio_.to_double();
  return f;
}

Frequency Frequency::decimal(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("frequency must be finite");
  }
  Frequency f;
  f.exact_ = false;
  f.value_ = value;
  return f;
}

Frequency Frequency::parse(const std::string& text) {
  const auto parse_int = [](std::string_view sv, std::int64_t& out) {
    if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
    const char* first = sv.data();
    const char* last = sv.data() + sv.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
  };

  std::string t = text;
  t.erase(std::remove_if(t.begin(), t.end(),
                         [](unsigned char ch) { return std::isspace(ch); }),
          t.end());
  if (t.empty()) throw std::invalid_argument("empty frequency");

  if (const auto slash = t.find('/'); slash != std::string::npos) {
    std::int64_t num = 0, den = 0;
    if (!parse_int(std::string_view(t).substr(0, slash), num) ||
        !parse_int(std::string_view(t).substr(slash + 1), den) || den == 0) {
      throw std::invalid_argument("cannot parse frequency '" + text + "'");
    }
    return rational(num, den);
  }
  if (std::int64_t v = 0; parse_int(t, v)) {
    return rational(v, 1);
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("");
    return decimal(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse frequency '" + text + "'");
  }
}

CollisionError::CollisionError(const std::string& what,
                               std::vector<SitePair> pairs)
    : std::runtime_error(what), pairs_(std::move(pairs)) {}

SpectrumModel encode(const walk::LatticeState& s, const EncodingConfig& cfg) {
  require_positive_shifts(cfg);
  const bool exact = cfg.exact();

  struct Entry {
    Rational freq_exact;
    double freq = 0.0;
    std::int32_t x = 0, y = 0;
    double ix = 0.0, iy = 0.0;
  };
  std::vector<Entry> entries;
  entries.reserve(s.size());
  for (const auto& site : s.sites()) {
    Entry e;
    e.x = site.x;
    e.y = site.y;
    e.ix = std::norm(site.amp[kRight]) + std::norm(site.amp[kLeft]);
    e.iy = std::norm(site.amp[kUp]) + std::norm(site.amp[kDown]);
    if (exact) {
      e.freq_exact = cfg.omega0.ratio() + cfg.omega_x.ratio().scaled(site.x) +
                     cfg.omega_y.ratio().scaled(site.y);
      e.freq = e.freq_exact.to_double();
    } else {
      e.freq = cfg.omega0.value() + site.x * cfg.omega_x.value() +
               site.y * cfg.omega_y.value();
    }
    entries.push_back(e);
  }

  std::sort(entries.begin(), entries.end(),
            [exact](const Entry& a, const Entry& b) {
              return exact ? a.freq_exact < b.freq_exact : a.freq < b.freq;
            });

  const double tol = kCollisionRelTol * cfg.omega_x.value();
  const auto same_freq = [&](const Entry& a, const Entry& b) {
    return exact ? a.freq_exact == b.freq_exact : std::abs(a.freq - b.freq) <= tol;
  };

  // Group equal frequencies; any group with more than one site collides.
  std::vector<SitePair> collisions;
  SpectrumModel model;
  model.exact = exact;
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i + 1;
    while (j < entries.size() && same_freq(entries[j - 1], entries[j])) ++j;
    for (std::size_t a = i; a < j; ++a) {
      for (std::size_t b = a + 1; b < j; ++b) {
        collisions.push_back(
            {entries[a].x, entries[a].y, entries[b].x, entries[b].y});
      }
    }
    if (collisions.empty()) {
      const Entry& e = entries[i];
      if (e.ix > 0.0) model.x_pol.push_back({e.freq_exact, e.freq, e.ix});
      if (e.iy > 0.0) model.y_pol.push_back({e.freq_exact, e.freq, e.iy});
    }
    i = j;
  }
  if (!collisions.empty()) {
    const std::string message = collision_message(collisions);
    throw CollisionError(message, std::move(collisions));
  }
  return model;
}

std::vector<SitePair> detect_collisions(const EncodingConfig& cfg, int extent) {
  if (extent < 0) throw std::invalid_argument("extent must be >= 0");
  require_positive_shifts(cfg);

  const std::int64_t span = 2LL * extent;
  // Canonical difference directions (dx > 0, or dx == 0 and dy > 0) with
  // dx*omega_x + dy*omega_y == 0; every colliding pair is a translate of one.
  std::vector<std::pair<std::int64_t, std::int64_t>> directions;

  if (cfg.exact()) {
    const Rational& wx = cfg.omega_x.ratio();
    const Rational& wy = cfg.omega_y.ratio();
    const Int128 a = static_cast<Int128>(wx.num()) * wy.den();
    const Int128 b = static_cast<Int128>(wy.num()) * wx.den();
    const Int128 g = gcd128(a, b);
    const Int128 sx = b / g;  // primitive dx
    const Int128 sy = a / g;  // primitive |dy|
    if (sx <= span && sy <= span) {
      for (Int128 k = 1; k * sx <= span && k * sy <= span; ++k) {
        directions.emplace_back(narrow(k * sx, "collision direction"),
                                narrow(-k * sy, "collision direction"));
      }
    }
  } else {
    const double tol = kCollisionRelTol * cfg.omega_x.value();
    const double wx = cfg.omega_x.value();
    const double wy = cfg.omega_y.value();
    for (std::int64_t dy = 1; dy <= span; ++dy) {
      if (std::abs(dy * wy) <= tol) directions.emplace_back(0, dy);
    }
    for (std::int64_t dx = 1; dx <= span; ++dx) {
      for (std::int64_t dy = -span; dy <= span; ++dy) {
        if (std::abs(dx * wx + dy * wy) <= tol) directions.emplace_back(dx, dy);
      }
    }
  }

  std::vector<SitePair> pairs;
  for (const auto& [dx, dy] : directions) {
    for (std::int64_t y1 = -extent; y1 <= extent; ++y1) {
      const std::int64_t y2 = y1 - dy;
      if (y2 < -extent || y2 > extent) continue;
      for (std::int64_t x1 = -extent; x1 <= extent; ++x1) {
        const std::int64_t x2 = x1 - dx;
        if (x2 < -extent || x2 > extent) continue;
        pairs.push_back({static_cast<std::int32_t>(x1),
                         static_cast<std::int32_t>(y1),
                         static_cast<std::int32_t>(x2),
                         static_cast<std::int32_t>(y2)});
      }
    }
  }
  return pairs;
}

PolarizedSpectrum polarizer(const SpectrumModel& spectrum, int angle_degrees) {
  PolarizedSpectrum out;
  out.exact = spectrum.exact;
  if (angle_degrees == 0) {
    out.pol = Polarization::kX;
    out.lines = spectrum.x_pol;
  } else if (angle_degrees == 90) {
    out.pol = Polarization::kY;
    out.lines = spectrum.y_pol;
  } else {
    throw std::invalid_argument("polarizer angle must be 0 or 90 degrees");
  }
  return out;
}

std::vector<DecodedSite> decode(const PolarizedSpectrum& ps,
                                const EncodingConfig& cfg, DecodeAxis axis,
                                int extent) {
  if (extent < 0) throw std::invalid_argument("extent must be >= 0");
  require_positive_shifts(cfg);
  const bool exact = ps.exact && cfg.exact();

  // Exact integer quotient of delta / omega; false when not an integer.
  const auto exact_steps = [](const Rational& delta, const Rational& omega,
                              std::int64_t& out) {
    const Int128 num = static_cast<Int128>(delta.num()) * omega.den();
    const Int128 den = static_cast<Int128>(delta.den()) * omega.num();
    if (num % den != 0) return false;
    out = narrow(num / den, "decode");
    return true;
  };
  const double tol = kCollisionRelTol * cfg.omega_x.value();
  // Nearest-integer quotient within tolerance on the frequency residual.
  const auto approx_steps = [&](double delta, double omega, std::int64_t& out) {
    const double q = delta / omega;
    const double r = std::round(q);
    if (std::abs((q - r) * omega) > tol) return false;
    out = static_cast<std::int64_t>(r);
    return true;
  };

  std::vector<DecodedSite> sites;
  for (const SpectralLine& line : ps.lines) {
    std::vector<std::pair<std::int64_t, std::int64_t>> candidates;
    if (axis == DecodeAxis::kXAxis || axis == DecodeAxis::kYAxis) {
      const bool on_x = axis == DecodeAxis::kXAxis;
      const Frequency& omega = on_x ? cfg.omega_x : cfg.omega_y;
      std::int64_t steps = 0;
      bool ok;
      if (exact) {
        ok = exact_steps(line.freq_exact - cfg.omega0.ratio(), omega.ratio(),
                         steps);
      } else {
        ok = approx_steps(line.frequency - cfg.omega0.value(), omega.value(),
                          steps);
      }
      if (!ok) {
        throw std::invalid_argument(
            "spectral line does not lie on the assumed axis lattice");
      }
      candidates.emplace_back(on_x ? steps : 0, on_x ? 0 : steps);
    } else {
      for (std::int64_t y = -extent; y <= extent; ++y) {
        std::int64_t x = 0;
        bool ok;
        if (exact) {
          const Rational rem = line.freq_exact - cfg.omega0.ratio() -
                               cfg.omega_y.ratio().scaled(y);
          ok = exact_steps(rem, cfg.omega_x.ratio(), x);
        } else {
          const double rem = line.frequency - cfg.omega0.value() -
                             static_cast<double>(y) * cfg.omega_y.value();
          ok = approx_steps(rem, cfg.omega_x.value(), x);
        }
        if (ok && std::abs(x) <= extent) candidates.emplace_back(x, y);
      }
      if (candidates.empty()) {
        throw std::invalid_argument(
            "spectral line has no lattice preimage within the extent");
      }
      if (candidates.size() > 1) {
        std::vector<SitePair> pairs;
        for (std::size_t a = 0; a < candidates.size(); ++a) {
          for (std::size_t b = a + 1; b < candidates.size(); ++b) {
            pairs.push_back({static_cast<std::int32_t>(candidates[a].first),
                             static_cast<std::int32_t>(candidates[a].second),
                             static_cast<std::int32_t>(candidates[b].first),
                             static_cast<std::int32_t>(candidates[b].second)});
          }
        }
        const std::string message =
            "ambiguous decode: " + collision_message(pairs);
        throw CollisionError(message, std::move(pairs));
      }
    }
    sites.push_back({static_cast<std::int32_t>(candidates.front().first),
                     static_cast<std::int32_t>(candidates.front().second),
                     line.intensity});
  }

  std::sort(sites.begin(), sites.end(),
            [](const DecodedSite& a, const DecodedSite& b) {
              return a.y != b.y ? a.y < b.y : a.x < b.x;
            });
  return sites;
}

}  // namespace qw::spectral
