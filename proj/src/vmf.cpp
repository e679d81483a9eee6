#include "qamp/vmf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/legendre.hpp>

#include "qamp/errors.hpp"

namespace qamp::vmf {

namespace {

// Below this kappa, coth(kappa) - 1/kappa loses digits to cancellation.
constexpr double kSeriesKappa = 1e-2;

// Density in u = cos(theta), normalized on [-1, 1].
double density_in_u(double u, double kappa) {
  if (kappa == 0.0) return 0.5;
  return kappa * std::exp(kappa * (u - 1.0)) / -std::expm1(-2.0 * kappa);
}

}  // namespace

void KnowledgePrior::validate() const {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw InvalidParameter("kappa must be a finite non-negative number (kappa = " +
                           std::to_string(kappa) + ")");
  }
}

void QuadratureSpec::validate() const {
  if (nodes < 8) throw InvalidParameter("quadrature needs at least 8 nodes");
}

double density(double theta, KnowledgePrior prior) {
  prior.validate();
  return density_in_u(std::cos(theta), prior.kappa) / (2 * std::numbers::pi);
}

double cdf(double theta, KnowledgePrior prior) {
  prior.validate();
  const double u = std::cos(theta);
  if (prior.kappa == 0.0) return (1.0 - u) / 2;
  return std::expm1(prior.kappa * (u - 1.0)) / std::expm1(-2.0 * prior.kappa);
}

double quantile(double p, KnowledgePrior prior) {
  prior.validate();
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("quantile needs 0 < p < 1");
  double u = prior.kappa == 0.0 ? 1.0 - 2.0 * p
                                : 1.0 + std::log1p(p * std::expm1(-2.0 * prior.kappa)) / prior.kappa;
  return std::acos(std::clamp(u, -1.0, 1.0));
}

double mean_cos(KnowledgePrior prior) {
  prior.validate();
  const double k = prior.kappa;
  if (k < kSeriesKappa) {
    const double k2 = k * k;
    return k * (1.0 / 3 - k2 * (1.0 / 45 - k2 * (2.0 / 945 - k2 / 4725)));
  }
  return 1.0 / std::tanh(k) - 1.0 / k;
}

PolarizationWeights mean_weights(KnowledgePrior prior) {
  const double m = mean_cos(prior);
  return {(1.0 + m) / 2, (1.0 - m) / 2};
}

CosThetaQuadrature::CosThetaQuadrature(KnowledgePrior prior, QuadratureSpec spec) : prior_(prior) {
  prior.validate();
  spec.validate();
  const unsigned n = static_cast<unsigned>(spec.nodes);
  const double lo = prior.kappa > 30.0 ? 1.0 - 60.0 / prior.kappa : -1.0;
  const double half = (1.0 - lo) / 2;
  const double mid = (1.0 + lo) / 2;

  // legendre_p_zeros returns the non-negative roots only.
  const auto zeros = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
  std::vector<double> x;
  x.reserve(n);
  for (double z : zeros) {
    x.push_back(z);
    if (z != 0.0) x.push_back(-z);
  }
  std::sort(x.begin(), x.end());

  u_.reserve(n);
  w_.reserve(n);
  for (double xi : x) {
    const double dp = boost::math::legendre_p_prime(static_cast<int>(n), xi);
    const double gl_weight = 2.0 / ((1.0 - xi * xi) * dp * dp);
    const double u = mid + half * xi;
    u_.push_back(u);
    w_.push_back(half * gl_weight * density_in_u(u, prior.kappa));
  }
}

std::optional<double> average_fidelity(const AmplifierParams& params, const CosThetaQuadrature& quad,
                                       FeedForward ff) {
  const auto xy = xy_coefficients(params);
  double total = 0.0;
  double mass = 0.0;
  const auto u = quad.nodes();
  const auto w = quad.weights();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto f = try_fidelity(xy, {(1.0 + u[i]) / 2, (1.0 - u[i]) / 2}, ff);
    if (!f) continue;
    total += w[i] * *f;
    mass += w[i];
  }
  if (mass <= 0.0) return std::nullopt;
  return total / mass;
}

AveragedMetrics average_metrics(const AmplifierParams& params, double beta_sq,
                                const CosThetaQuadrature& quad, FeedForward ff) {
  const auto weights = mean_weights(quad.prior());
  AveragedMetrics m;
  m.avg_p = success_probability(beta_sq, weights, params, ff);
  m.avg_g = overall_gain(weights, params, ff);
  m.avg_f = average_fidelity(params, quad, ff);
  return m;
}

AveragedMetrics average_metrics(const AmplifierParams& params, KnowledgePrior prior,
                                double beta_sq, QuadratureSpec quad, FeedForward ff) {
  return average_metrics(params, beta_sq, CosThetaQuadrature(prior, quad), ff);
}

}  // namespace qamp::vmf
