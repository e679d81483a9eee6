#pragma once

// Closed-form model of the heralded linear-optical qubit amplifier.
//
// A signal alpha|0> + beta|Q>, |Q> = cos(theta/2)|H> + sin(theta/2)e^{i phi}|V>,
// interacts with an ancilla pair cos(chi)|HH> + sin(chi)|VV> on two partially
// polarizing beam splitters of reflectivity r. Post-selection on one photon in
// each detector, projected onto diagonal/anti-diagonal polarization, heralds
// one of two (unnormalized) output states. Every quantity below is a pure
// function of (chi, r) and the signal.
//
// All angles are in radians.

#include <complex>
#include <optional>
#include <utility>

#include <Eigen/Core>

#include "qamp/gain.hpp"

namespace qamp {

using Complex = std::complex<double>;

// Whether the lossy polarization-dependent filtration (tau_H, tau_V) is
// applied on the DD/AA branch. The lossless V -> -V flip on the DA/AD branch
// is always applied.
enum class FeedForward : bool { Off = false, On = true };

// Below this magnitude a denominator is treated as exactly zero.
inline constexpr double kDegenerateCutoff = 1e-14;

struct AmplifierParams {
  double chi = 0.0;  // ancilla angle, [0, pi/4]
  double r = 0.0;    // PPBS amplitude reflectivity, [0, 1]

  // Throws InvalidParameter naming the violated range.
  void validate() const;
};

struct SignalState {
  Complex alpha{1.0, 0.0};
  Complex beta{0.0, 0.0};
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2 pi)

  // Real, non-negative alpha and beta with |beta|^2 = beta_sq.
  static SignalState from_populations(double beta_sq, double theta, double phi = 0.0);

  double alpha_sq() const { return std::norm(alpha); }
  double beta_sq() const { return std::norm(beta); }

  // Throws InvalidParameter on |alpha|^2 + |beta|^2 != 1 (1e-12) or angles
  // out of range.
  void validate() const;
};

struct XYCoefficients {
  double x_plus = 0.0;
  double x_minus = 0.0;
  double y_plus = 0.0;
  double y_minus = 0.0;
};

enum class Branch { Out1, Out2, Out1FF, Out2FF };

// Unnormalized output amplitudes for one heralding branch. The squared norm is
// that branch's (per-coincidence) contribution to the success probability.
struct BranchAmplitudes {
  Complex vac;
  Complex h;
  Complex v;
  Branch branch = Branch::Out1;

  double norm_sq() const { return std::norm(vac) + std::norm(h) + std::norm(v); }
  double qubit_norm_sq() const { return std::norm(h) + std::norm(v); }
};

struct FilterTransmittances {
  std::optional<double> tau_h;  // empty when |x_+| < cutoff
  std::optional<double> tau_v;  // empty when |y_+| < cutoff
  bool physical = false;        // both defined and |tau| <= 1

  bool defined() const { return tau_h.has_value() && tau_v.has_value(); }
};

struct MetricSet {
  double p_succ = 0.0;
  Gain g_h = Gain::infinite();
  Gain g_v = Gain::infinite();
  Gain g_overall = Gain::infinite();
  std::optional<double> fidelity;  // empty when the signal has no qubit part
  FeedForward feedforward = FeedForward::On;
  bool physical_filter = false;
};

// Normalized single-photon output state rho_outQ, basis (|H>, |V>).
using QubitDensity = Eigen::Matrix2cd;

// Populations of |H> and |V> in the input qubit, either for one state
// (cos^2(theta/2), sin^2(theta/2)) or averaged over a prior.
struct PolarizationWeights {
  double h = 1.0;
  double v = 0.0;

  static PolarizationWeights at(double theta);
};

struct InfiniteGainMetrics {
  double p_succ = 0.0;
  double fidelity = 0.0;
};

// Quadratic n2 u^2 + n1 u + n0 in u = r^2 equal to the qubit transmission
// (see qubit_transmission) at a fixed chi. Every x and y coefficient is
// affine in u, so gain * u = transmission is a quadratic equation in u.
struct TransmissionPolynomial {
  double n2 = 0.0;
  double n1 = 0.0;
  double n0 = 0.0;

  double operator()(double u) const { return (n2 * u + n1) * u + n0; }
};

XYCoefficients xy_coefficients(const AmplifierParams& params);

// (Out1, Out2): DD/AA and DA/AD heralded states, before any correction.
std::pair<BranchAmplitudes, BranchAmplitudes> branch_states(const SignalState& signal,
                                                            const AmplifierParams& params);

FilterTransmittances filter_transmittances(const AmplifierParams& params);

// (Out1FF, Out2FF): Out1 after tau_H/tau_V filtration, Out2 after V -> -V.
// Throws DegenerateFilter when the filtration is undefined.
std::pair<BranchAmplitudes, BranchAmplitudes> feedforward_states(const SignalState& signal,
                                                                 const AmplifierParams& params);

// Sum over the four equally weighted coincidence patterns of the heralded
// qubit weight per unit |beta|^2:
//   On:  x_-^2 w_h + y_-^2 w_v
//   Off: (x_+^2 + x_-^2)/2 w_h + (y_+^2 + y_-^2)/2 w_v
double qubit_transmission(const XYCoefficients& xy, PolarizationWeights weights, FeedForward ff);

TransmissionPolynomial transmission_polynomial(double chi, PolarizationWeights weights,
                                               FeedForward ff);

double success_probability(const SignalState& signal, const AmplifierParams& params,
                           FeedForward ff);

// Success probability for population weights |alpha|^2 = 1 - beta_sq,
// |beta|^2 = beta_sq. Linear in the weights, so prior averages plug in directly.
double success_probability(double beta_sq, PolarizationWeights weights,
                           const AmplifierParams& params, FeedForward ff);

// (G_H, G_V); both infinite when r = 0.
std::pair<Gain, Gain> gains(const AmplifierParams& params, FeedForward ff);

Gain overall_gain(double theta, const AmplifierParams& params, FeedForward ff);
Gain overall_gain(PolarizationWeights weights, const AmplifierParams& params, FeedForward ff);

// Throws EmptyQubitSubspace when the heralded qubit weight vanishes.
double fidelity(double theta, const AmplifierParams& params, FeedForward ff);

// Same as fidelity() but reports the empty subspace as std::nullopt.
std::optional<double> try_fidelity(double theta, const AmplifierParams& params, FeedForward ff);

// Fidelity for a pure input with populations w (w.h + w.v = 1).
std::optional<double> try_fidelity(const XYCoefficients& xy, PolarizationWeights w, FeedForward ff);

// Balanced mixture of the DD/AA and (V-flipped) DA/AD qubit parts, normalized.
// Throws EmptyQubitSubspace.
QubitDensity output_qubit_density(const SignalState& signal, const AmplifierParams& params);

// r = 0 specialization. Throws EmptyQubitSubspace when the fidelity is
// undefined (chi = 0 with theta = pi).
InfiniteGainMetrics infinite_gain_metrics(double beta_sq, double theta, double chi);

// All scalar metrics for one feed-forward setting. The fidelity is left empty
// when beta = 0 or the qubit subspace is empty.
MetricSet evaluate(const SignalState& signal, const AmplifierParams& params, FeedForward ff);

}  // namespace qamp
