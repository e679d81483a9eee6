#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace qamp {

// Linear amplification gain. Infinite gain (r = 0, vacuum fully suppressed)
// is a distinct category rather than an IEEE infinity so that comparisons
// and dB conversions never see inf/NaN arithmetic.
class Gain {
 public:
  static Gain finite(double linear);
  static Gain from_db(double db);
  static constexpr Gain infinite() { return Gain(0.0, true); }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }

  // Linear value; +inf for the infinite category.
  double linear() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  // 10 log10(G). -inf for zero gain, +inf for the infinite category.
  double db() const;

  // "inf" or the linear value with 12 significant digits.
  std::string to_string() const;

  friend constexpr bool operator==(const Gain& a, const Gain& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  constexpr Gain(double value, bool infinite) : value_(value), infinite_(infinite) {}

  double value_;
  bool infinite_;
};

// Distance used by gain constraints: |dB(a) - dB(b)| for two finite gains,
// 0 for two infinite gains, +inf when exactly one side is infinite.
double gain_distance_db(const Gain& a, const Gain& b);

}  // namespace qamp
