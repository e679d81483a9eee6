#include "qamp/gain.hpp"

#include <cstdio>

#include "qamp/errors.hpp"

namespace qamp {

Gain Gain::finite(double linear) {
  if (!(linear >= 0.0) || !std::isfinite(linear)) {
    throw InvalidParameter("finite gain must be a non-negative real number");
  }
  return Gain(linear, false);
}

Gain Gain::from_db(double db) {
  if (std::isnan(db)) throw InvalidParameter("gain in dB must not be NaN");
  if (db == std::numeric_limits<double>::infinity()) return infinite();
  return finite(std::pow(10.0, db / 10.0));
}

double Gain::db() const {
  if (infinite_) return std::numeric_limits<double>::infinity();
  if (value_ == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(value_);
}

std::string Gain::to_string() const {
  if (infinite_) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value_);
  return buf;
}

double gain_distance_db(const Gain& a, const Gain& b) {
  if (a.is_infinite() || b.is_infinite()) {
    return a.is_infinite() == b.is_infinite() ? 0.0 : std::numeric_limits<double>::infinity();
  }
  if (a.linear() == b.linear()) return 0.0;
  return std::abs(a.db() - b.db());
}

}  // namespace qamp
