#include "qamp/model.hpp"

#include "qamp/errors.hpp"

namespace qamp {

ModelPoint PerformanceModel::evaluate(const AmplifierParams& params) const {
  ModelPoint m;
  m.p_succ = success_probability(params);
  m.gain = gain(params);
  m.fidelity = fidelity(params);
  m.physical_filter = filter_transmittances(params).physical;
  return m;
}

double PerformanceModel::success_probability(const AmplifierParams& params) const {
  return qamp::success_probability(beta_sq(), weights(), params, feedforward());
}

Gain PerformanceModel::gain(const AmplifierParams& params) const {
  return overall_gain(weights(), params, feedforward());
}

TransmissionPolynomial PerformanceModel::transmission(double chi) const {
  return transmission_polynomial(chi, weights(), feedforward());
}

FixedStateModel::FixedStateModel(SignalState signal, FeedForward ff)
    : signal_(signal), ff_(ff), weights_(PolarizationWeights::at(signal.theta)) {
  signal_.validate();
}

std::optional<double> FixedStateModel::fidelity(const AmplifierParams& params) const {
  if (signal_.beta_sq() == 0.0) return std::nullopt;
  return try_fidelity(xy_coefficients(params), weights_, ff_);
}

PriorAveragedModel::PriorAveragedModel(vmf::KnowledgePrior prior, double beta_sq, FeedForward ff,
                                       vmf::QuadratureSpec quad)
    : quad_(prior, quad), beta_sq_(beta_sq), ff_(ff), weights_(vmf::mean_weights(prior)) {
  if (!(beta_sq >= 0.0 && beta_sq <= 1.0)) throw InvalidParameter("|beta|^2 must lie in [0, 1]");
}

std::optional<double> PriorAveragedModel::fidelity(const AmplifierParams& params) const {
  if (beta_sq_ == 0.0) return std::nullopt;
  return vmf::average_fidelity(params, quad_, ff_);
}

}  // namespace qamp
