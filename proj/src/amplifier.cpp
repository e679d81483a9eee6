#include "qamp/amplifier.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "qamp/errors.hpp"

namespace qamp {

namespace {

constexpr double kRangeSlack = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

std::string describe(const char* name, double value) {
  std::ostringstream os;
  os.precision(17);
  os << name << " = " << value;
  return os.str();
}

// NaN marks an empty qubit subspace.
double fidelity_ff(const XYCoefficients& xy, PolarizationWeights w) {
  const double den = xy.x_minus * xy.x_minus * w.h + xy.y_minus * xy.y_minus * w.v;
  if (den < kDegenerateCutoff) return std::nan("");
  const double overlap = xy.x_minus * w.h + xy.y_minus * w.v;
  return overlap * overlap / den;
}

double fidelity_no_ff(const XYCoefficients& xy, PolarizationWeights w) {
  const double den = (xy.x_plus * xy.x_plus + xy.x_minus * xy.x_minus) * w.h +
                     (xy.y_plus * xy.y_plus + xy.y_minus * xy.y_minus) * w.v;
  if (den < kDegenerateCutoff) return std::nan("");
  const double o1 = xy.x_plus * w.h + xy.y_plus * w.v;
  const double o2 = xy.x_minus * w.h + xy.y_minus * w.v;
  return (o1 * o1 + o2 * o2) / den;
}

}  // namespace

void AmplifierParams::validate() const {
  require(std::isfinite(chi) && chi >= -kRangeSlack && chi <= std::numbers::pi / 4 + kRangeSlack,
          "chi must satisfy 0 <= chi <= pi/4 (" + describe("chi", chi) + ")");
  require(std::isfinite(r) && r >= 0.0 && r <= 1.0, "r must satisfy 0 <= r <= 1 (" + describe("r", r) + ")");
}

SignalState SignalState::from_populations(double beta_sq, double theta, double phi) {
  require(std::isfinite(beta_sq) && beta_sq >= 0.0 && beta_sq <= 1.0,
          "|beta|^2 must lie in [0, 1] (" + describe("beta_sq", beta_sq) + ")");
  SignalState s;
  s.alpha = Complex(std::sqrt(1.0 - beta_sq), 0.0);
  s.beta = Complex(std::sqrt(beta_sq), 0.0);
  s.theta = theta;
  s.phi = phi;
  return s;
}

void SignalState::validate() const {
  const double total = alpha_sq() + beta_sq();
  require(std::abs(total - 1.0) <= 1e-12,
          "|alpha|^2 + |beta|^2 must equal 1 (" + describe("sum", total) + ")");
  require(std::isfinite(theta) && theta >= -kRangeSlack && theta <= std::numbers::pi + kRangeSlack,
          "theta must satisfy 0 <= theta <= pi (" + describe("theta", theta) + ")");
  require(std::isfinite(phi) && phi >= -kRangeSlack && phi < 2 * std::numbers::pi,
          "phi must satisfy 0 <= phi < 2 pi (" + describe("phi", phi) + ")");
}

PolarizationWeights PolarizationWeights::at(double theta) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  return {c * c, s * s};
}

XYCoefficients xy_coefficients(const AmplifierParams& params) {
  const double u = params.r * params.r;
  const double common = 2 * u - 1;
  const double c = std::cos(params.chi);
  const double s = std::sin(params.chi);
  return {common * c + u * s, common * c - u * s, common * s + u * c, common * s - u * c};
}

std::pair<BranchAmplitudes, BranchAmplitudes> branch_states(const SignalState& signal,
                                                            const AmplifierParams& params) {
  const auto xy = xy_coefficients(params);
  const double c = std::cos(params.chi);
  const double s = std::sin(params.chi);
  const Complex h_amp = signal.beta * std::cos(signal.theta / 2) / 2.0;
  const Complex v_amp = signal.beta * std::sin(signal.theta / 2) * std::polar(1.0, signal.phi) / 2.0;
  const Complex vac = signal.alpha * params.r / 2.0;

  BranchAmplitudes out1{vac * (c + s), h_amp * xy.x_plus, v_amp * xy.y_plus, Branch::Out1};
  BranchAmplitudes out2{vac * (c - s), h_amp * xy.x_minus, -v_amp * xy.y_minus, Branch::Out2};
  return {out1, out2};
}

FilterTransmittances filter_transmittances(const AmplifierParams& params) {
  const auto xy = xy_coefficients(params);
  FilterTransmittances t;
  if (params.r == 0.0) {
    // x_+ = x_- and y_+ = y_-: nothing to filter, even where both vanish
    t.tau_h = 1.0;
    t.tau_v = 1.0;
    t.physical = true;
    return t;
  }
  if (std::abs(xy.x_plus) >= kDegenerateCutoff) t.tau_h = xy.x_minus / xy.x_plus;
  if (std::abs(xy.y_plus) >= kDegenerateCutoff) t.tau_v = xy.y_minus / xy.y_plus;
  t.physical = t.defined() && std::abs(*t.tau_h) <= 1.0 + kRangeSlack &&
               std::abs(*t.tau_v) <= 1.0 + kRangeSlack;
  return t;
}

std::pair<BranchAmplitudes, BranchAmplitudes> feedforward_states(const SignalState& signal,
                                                                 const AmplifierParams& params) {
  const auto tau = filter_transmittances(params);
  if (!tau.defined()) {
    throw DegenerateFilter("feed-forward filtration undefined: x_+ or y_+ vanishes at " +
                           describe("chi", params.chi) + ", " + describe("r", params.r));
  }
  auto [out1, out2] = branch_states(signal, params);
  out1.h *= *tau.tau_h;
  out1.v *= *tau.tau_v;
  out1.branch = Branch::Out1FF;
  out2.v = -out2.v;
  out2.branch = Branch::Out2FF;
  return {out1, out2};
}

double qubit_transmission(const XYCoefficients& xy, PolarizationWeights w, FeedForward ff) {
  if (ff == FeedForward::On) {
    return xy.x_minus * xy.x_minus * w.h + xy.y_minus * xy.y_minus * w.v;
  }
  return 0.5 * ((xy.x_plus * xy.x_plus + xy.x_minus * xy.x_minus) * w.h +
                (xy.y_plus * xy.y_plus + xy.y_minus * xy.y_minus) * w.v);
}

TransmissionPolynomial transmission_polynomial(double chi, PolarizationWeights w, FeedForward ff) {
  // x_pm(u) = a u - b with (a, b) = (2c pm s, c); y_pm(u) = (2s pm c) u - s.
  const double c = std::cos(chi);
  const double s = std::sin(chi);
  TransmissionPolynomial poly;
  auto add = [&poly](double weight, double a, double b) {
    poly.n2 += weight * a * a;
    poly.n1 -= 2 * weight * a * b;
    poly.n0 += weight * b * b;
  };
  if (ff == FeedForward::On) {
    add(w.h, 2 * c - s, c);
    add(w.v, 2 * s - c, s);
  } else {
    add(0.5 * w.h, 2 * c + s, c);
    add(0.5 * w.h, 2 * c - s, c);
    add(0.5 * w.v, 2 * s + c, s);
    add(0.5 * w.v, 2 * s - c, s);
  }
  return poly;
}

double success_probability(double beta_sq, PolarizationWeights weights,
                           const AmplifierParams& params, FeedForward ff) {
  const auto xy = xy_coefficients(params);
  return (1.0 - beta_sq) * params.r * params.r + beta_sq * qubit_transmission(xy, weights, ff);
}

double success_probability(const SignalState& signal, const AmplifierParams& params,
                           FeedForward ff) {
  const auto xy = xy_coefficients(params);
  return signal.alpha_sq() * params.r * params.r +
         signal.beta_sq() * qubit_transmission(xy, PolarizationWeights::at(signal.theta), ff);
}

std::pair<Gain, Gain> gains(const AmplifierParams& params, FeedForward ff) {
  if (params.r == 0.0) return {Gain::infinite(), Gain::infinite()};
  const auto xy = xy_coefficients(params);
  const double u = params.r * params.r;
  return {Gain::finite(qubit_transmission(xy, {1.0, 0.0}, ff) / u),
          Gain::finite(qubit_transmission(xy, {0.0, 1.0}, ff) / u)};
}

Gain overall_gain(PolarizationWeights weights, const AmplifierParams& params, FeedForward ff) {
  if (params.r == 0.0) return Gain::infinite();
  const auto xy = xy_coefficients(params);
  return Gain::finite(qubit_transmission(xy, weights, ff) / (params.r * params.r));
}

Gain overall_gain(double theta, const AmplifierParams& params, FeedForward ff) {
  return overall_gain(PolarizationWeights::at(theta), params, ff);
}

std::optional<double> try_fidelity(const XYCoefficients& xy, PolarizationWeights w, FeedForward ff) {
  const double f = ff == FeedForward::On ? fidelity_ff(xy, w) : fidelity_no_ff(xy, w);
  if (std::isnan(f)) return std::nullopt;
  return f;
}

std::optional<double> try_fidelity(double theta, const AmplifierParams& params, FeedForward ff) {
  return try_fidelity(xy_coefficients(params), PolarizationWeights::at(theta), ff);
}

double fidelity(double theta, const AmplifierParams& params, FeedForward ff) {
  auto f = try_fidelity(theta, params, ff);
  if (!f) {
    throw EmptyQubitSubspace("heralded output has no qubit component at " + describe("theta", theta) +
                             ", " + describe("chi", params.chi) + ", " + describe("r", params.r));
  }
  return *f;
}

QubitDensity output_qubit_density(const SignalState& signal, const AmplifierParams& params) {
  auto [out1, out2] = branch_states(signal, params);
  Eigen::Vector2cd q1(out1.h, out1.v);
  Eigen::Vector2cd q2(out2.h, -out2.v);
  QubitDensity rho = q1 * q1.adjoint() + q2 * q2.adjoint();
  const double trace = rho.trace().real();
  if (trace < kDegenerateCutoff) {
    throw EmptyQubitSubspace("output qubit subspace is empty at " + describe("theta", signal.theta) +
                             ", " + describe("chi", params.chi) + ", " + describe("r", params.r));
  }
  return rho / trace;
}

InfiniteGainMetrics infinite_gain_metrics(double beta_sq, double theta, double chi) {
  const double c2 = std::cos(theta / 2) * std::cos(theta / 2);
  const double s2 = std::sin(theta / 2) * std::sin(theta / 2);
  const double cc = std::cos(chi);
  const double sc = std::sin(chi);
  const double den = cc * cc * c2 + sc * sc * s2;
  if (den < kDegenerateCutoff) {
    throw EmptyQubitSubspace("infinite-gain output has no qubit component at " +
                             describe("theta", theta) + ", " + describe("chi", chi));
  }
  const double overlap = cc * c2 + sc * s2;
  return {beta_sq * den, overlap * overlap / den};
}

MetricSet evaluate(const SignalState& signal, const AmplifierParams& params, FeedForward ff) {
  MetricSet m;
  m.feedforward = ff;
  m.p_succ = success_probability(signal, params, ff);
  std::tie(m.g_h, m.g_v) = gains(params, ff);
  m.g_overall = overall_gain(signal.theta, params, ff);
  if (signal.beta_sq() > 0.0) m.fidelity = try_fidelity(signal.theta, params, ff);
  m.physical_filter = filter_transmittances(params).physical;
  return m;
}

}  // namespace qamp
