#pragma once

// Success probability versus fidelity at a fixed overall gain, for a fixed
// input state or averaged over a vMF prior, and the merit function
//   M = max(P F) / P(F = 1).

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "qamp/contour.hpp"
#include "qamp/model.hpp"
#include "qamp/sweep.hpp"
#include "qamp/vmf.hpp"

namespace qamp {

struct FixedTheta {
  double theta = 0.0;
};

using InputKnowledge = std::variant<vmf::KnowledgePrior, FixedTheta>;

struct CurveSpec {
  InputKnowledge input = vmf::KnowledgePrior{0.0};
  Gain g_target = Gain::infinite();
  std::vector<double> f_grid;  // empty: f_points targets from the threshold up to 1
  int f_points = 200;
  double beta_sq = 0.5;
  FeedForward feedforward = FeedForward::On;
  ConstraintOptions constraints;
  // used only by the lower-bound gain constraint, which searches a grid
  int chi_steps = 401;
  int r_steps = 401;
  vmf::QuadratureSpec quad;

  void validate() const;
};

struct CurvePoint {
  double f_target = 1.0;
  std::optional<double> f;
  double p = 0.0;
  double chi = 0.0;
  double r = 0.0;
  Gain gain = Gain::infinite();
  bool reachable = false;
};

struct MeritResult {
  double merit = 1.0;
  CurvePoint best;  // maximizer of P F
  CurvePoint unit;  // best point at F = 1
};

// Fidelity below which unit fidelity is not considered reached by merit().
inline constexpr double kUnitFidelityTol = 1e-9;

std::unique_ptr<PerformanceModel> make_model(const CurveSpec& spec);

// (F, P) along r = 0 for chi_steps values of chi in [0, pi/4].
std::vector<CurvePoint> infinite_gain_curve(double theta, double beta_sq, int chi_steps);

// Uniform targets from the threshold fidelity at this gain up to 1.
std::vector<double> default_f_grid(const PerformanceModel& model, const Gain& gain, int points);

std::vector<CurvePoint> averaged_tradeoff_curve(const CurveSpec& spec);

// Maximum of P over all settings realizing the gain, ignoring fidelity.
CurvePoint max_probability_point(const CurveSpec& spec);

// Throws UnreachableUnitFidelity when no setting reaches F = 1 at the gain.
MeritResult merit(const CurveSpec& spec);

}  // namespace qamp
