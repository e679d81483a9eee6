#pragma once

// A performance model maps device settings (chi, r) to (P, G, F) for one
// input description: a fixed signal state, or an average over a vMF prior.
// In both cases P and G are exact functions of two population weights, so
// the qubit transmission stays quadratic in u = r^2.

#include <optional>

#include "qamp/amplifier.hpp"
#include "qamp/gain.hpp"
#include "qamp/vmf.hpp"

namespace qamp {

struct ModelPoint {
  double p_succ = 0.0;
  Gain gain = Gain::infinite();
  std::optional<double> fidelity;
  bool physical_filter = false;
};

class PerformanceModel {
 public:
  virtual ~PerformanceModel() = default;

  virtual double beta_sq() const = 0;
  virtual FeedForward feedforward() const = 0;
  virtual PolarizationWeights weights() const = 0;
  virtual std::optional<double> fidelity(const AmplifierParams& params) const = 0;

  ModelPoint evaluate(const AmplifierParams& params) const;
  double success_probability(const AmplifierParams& params) const;
  Gain gain(const AmplifierParams& params) const;

  // Qubit transmission T(u) at fixed chi; G = T(u) / u.
  TransmissionPolynomial transmission(double chi) const;
};

class FixedStateModel final : public PerformanceModel {
 public:
  FixedStateModel(SignalState signal, FeedForward ff);

  double beta_sq() const override { return signal_.beta_sq(); }
  FeedForward feedforward() const override { return ff_; }
  PolarizationWeights weights() const override { return weights_; }
  std::optional<double> fidelity(const AmplifierParams& params) const override;

  const SignalState& signal() const { return signal_; }

 private:
  SignalState signal_;
  FeedForward ff_;
  PolarizationWeights weights_;
};

class PriorAveragedModel final : public PerformanceModel {
 public:
  PriorAveragedModel(vmf::KnowledgePrior prior, double beta_sq, FeedForward ff,
                     vmf::QuadratureSpec quad = {});

  double beta_sq() const override { return beta_sq_; }
  FeedForward feedforward() const override { return ff_; }
  PolarizationWeights weights() const override { return weights_; }
  std::optional<double> fidelity(const AmplifierParams& params) const override;

  vmf::KnowledgePrior prior() const { return quad_.prior(); }

 private:
  vmf::CosThetaQuadrature quad_;
  double beta_sq_;
  FeedForward ff_;
  PolarizationWeights weights_;
};

}  // namespace qamp
