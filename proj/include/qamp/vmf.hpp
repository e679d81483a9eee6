#pragma once

// Isotropic von Mises-Fisher prior on the Poincare sphere, centred on |H>:
//   g(theta, kappa) = kappa / (4 pi sinh kappa) exp(kappa cos theta).
// All metrics of the amplifier are independent of phi, so every average
// reduces to a one-dimensional integral over u = cos(theta).

#include <optional>
#include <span>
#include <vector>

#include "qamp/amplifier.hpp"

namespace qamp::vmf {

struct KnowledgePrior {
  double kappa = 0.0;  // >= 0; 0 is the uniform distribution

  void validate() const;
};

struct QuadratureSpec {
  enum class Scheme { GaussLegendreInCosTheta };

  int nodes = 256;  // >= 8
  Scheme scheme = Scheme::GaussLegendreInCosTheta;

  void validate() const;
};

// Density per steradian.
double density(double theta, KnowledgePrior prior);

// Probability mass within angle theta of the pole.
double cdf(double theta, KnowledgePrior prior);

// Inverse of cdf for 0 < p < 1.
double quantile(double p, KnowledgePrior prior);

// <cos theta> = coth(kappa) - 1/kappa.
double mean_cos(KnowledgePrior prior);

// Population weights averaged over the prior: (1 +- <cos theta>) / 2.
PolarizationWeights mean_weights(KnowledgePrior prior);

// Gauss-Legendre rule in u = cos(theta) with the prior density folded into the
// weights, so expectation(f) approximates E[f(u)]. For kappa above 30 the rule
// covers only u >= 1 - 60/kappa; the neglected mass is below e^-60.
class CosThetaQuadrature {
 public:
  CosThetaQuadrature(KnowledgePrior prior, QuadratureSpec spec = {});

  template <class F>
  double expectation(F&& f) const {
    double total = 0.0;
    for (std::size_t i = 0; i < u_.size(); ++i) total += w_[i] * f(u_[i]);
    return total;
  }

  std::span<const double> nodes() const { return u_; }
  std::span<const double> weights() const { return w_; }
  KnowledgePrior prior() const { return prior_; }

 private:
  KnowledgePrior prior_;
  std::vector<double> u_;
  std::vector<double> w_;
};

struct AveragedMetrics {
  double avg_p = 0.0;
  Gain avg_g = Gain::infinite();
  std::optional<double> avg_f;  // empty if the qubit subspace is empty everywhere
};

// <P> and <G> through the closed forms linear in <cos theta>, <F> by
// quadrature. Fidelity nodes with an empty qubit subspace contribute zero
// weight to a renormalized average.
AveragedMetrics average_metrics(const AmplifierParams& params, double beta_sq,
                                const CosThetaQuadrature& quad, FeedForward ff);

AveragedMetrics average_metrics(const AmplifierParams& params, KnowledgePrior prior,
                                double beta_sq, QuadratureSpec quad, FeedForward ff);

// <F> alone (the expensive part of average_metrics).
std::optional<double> average_fidelity(const AmplifierParams& params,
                                       const CosThetaQuadrature& quad, FeedForward ff);

}  // namespace qamp::vmf
