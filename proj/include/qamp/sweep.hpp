#pragma once

// Grid sweeps over (chi, r) and constrained maximization of the success
// probability at a target (fidelity, gain).

#include <optional>
#include <span>
#include <vector>

#include "qamp/amplifier.hpp"
#include "qamp/contour.hpp"
#include "qamp/gain.hpp"
#include "qamp/model.hpp"

namespace qamp {

struct SweepSpec {
  int chi_steps = 401;
  int r_steps = 401;
  FeedForward feedforward = FeedForward::On;
  SignalState signal;

  void validate() const;
};

struct TradeoffPoint {
  double chi = 0.0;
  double r = 0.0;
  std::optional<double> fidelity;
  Gain gain = Gain::infinite();
  double p_succ = 0.0;
  bool physical_filter = false;
};

enum class GainConstraint { Equality, LowerBound };

struct ConstraintOptions {
  double f_tol = 5e-4;
  double g_tol_db = 0.05;
  GainConstraint gain_constraint = GainConstraint::Equality;
};

struct ConstrainedOptimum {
  TradeoffPoint best;
  double f_target = 1.0;
  Gain g_target = Gain::infinite();
  double f_tol = 0.0;
  double g_tol_db = 0.0;
  bool reachable = false;
};

struct ThresholdPoint {
  Gain gain = Gain::infinite();
  std::optional<double> f_min;  // empty when the gain is not realizable
  double chi = 0.0;
  double r = 0.0;
};

// chi_i = (pi/4) i / (chi_steps - 1), r_j = j / (r_steps - 1).
double grid_chi(int i, int chi_steps);
double grid_r(int j, int r_steps);

TradeoffPoint make_tradeoff_point(const PerformanceModel& model, const AmplifierParams& params);

// Rows in chi-major order.
std::vector<TradeoffPoint> grid_sweep(const SweepSpec& spec);
std::vector<TradeoffPoint> grid_sweep(const PerformanceModel& model, int chi_steps, int r_steps);

bool gain_satisfies(const Gain& gain, const Gain& target, const ConstraintOptions& options);
bool satisfies(const TradeoffPoint& point, double f_target, const Gain& g_target,
               const ConstraintOptions& options);

// Best point meeting both constraints among the grid and the settings that
// realize the target gain exactly, optionally refined by a penalized
// Nelder-Mead search. Refinement is kept only if it still meets the
// constraints and improves P, so it never lowers the grid answer.
ConstrainedOptimum max_psucc_at(double f_target, const Gain& g_target, const SweepSpec& spec, bool refine,
                                const ConstraintOptions& options = {});
ConstrainedOptimum max_psucc_at(double f_target, const Gain& g_target, const PerformanceModel& model,
                                std::span<const TradeoffPoint> grid, bool refine,
                                const ConstraintOptions& options = {});
// Same, reusing a contour built for g_target.
ConstrainedOptimum max_psucc_at(double f_target, const GainContour& contour, const PerformanceModel& model,
                                std::span<const TradeoffPoint> grid, bool refine,
                                const ConstraintOptions& options = {});

// max_psucc_at for every (gain, fidelity) pair, gain-major.
std::vector<ConstrainedOptimum> max_psucc_surface(std::span<const Gain> gains, std::span<const double> f_targets,
                                                  const PerformanceModel& model,
                                                  std::span<const TradeoffPoint> grid, bool refine,
                                                  const ConstraintOptions& options = {});

// Smallest fidelity compatible with each gain. Equality constraints use the
// exact gain contour; the lower-bound variant searches the grid.
std::vector<ThresholdPoint> threshold_curve(std::span<const Gain> gains, const SweepSpec& spec,
                                            const ConstraintOptions& options = {});
ThresholdPoint threshold(const PerformanceModel& model, const Gain& gain);

}  // namespace qamp
