#include "qamp/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <tbb/parallel_for.h>

#include "qamp/contour.hpp"
#include "qamp/errors.hpp"
#include "qamp/nelder_mead.hpp"

namespace qamp {

namespace {

constexpr double kChiMax = std::numbers::pi / 4;
constexpr double kPenalty = 1e6;
constexpr double kHuge = 1e300;
// Fraction of each tolerance the refinement may use freely; the margin keeps
// the penalty's residual overshoot inside the band.
constexpr double kFreeBand = 0.99;

double gain_violation_db(const Gain& gain, const Gain& target, GainConstraint kind) {
  if (target.is_infinite()) return gain.is_infinite() ? 0.0 : 1e3;
  if (kind == GainConstraint::LowerBound) {
    if (gain.is_infinite()) return 0.0;
    return std::max(0.0, target.db() - gain.db());
  }
  if (gain.is_infinite()) return 1e3;
  return gain_distance_db(gain, target);
}

std::optional<TradeoffPoint> refine_optimum(const TradeoffPoint& start, double f_target, const Gain& g_target,
                                            const PerformanceModel& model, const ConstraintOptions& options) {
  const bool infinite = g_target.is_infinite();
  auto params_of = [&](const std::vector<double>& x) {
    return AmplifierParams{x[0], infinite ? 0.0 : x[1]};
  };
  auto excess = [](double d, double tol) { return std::max(0.0, std::abs(d) - kFreeBand * tol); };
  auto objective = [&](const std::vector<double>& x) {
    const auto m = model.evaluate(params_of(x));
    const double df = m.fidelity ? excess(*m.fidelity - f_target, options.f_tol) : 1.0;
    const double dg = excess(gain_violation_db(m.gain, g_target, options.gain_constraint), options.g_tol_db);
    const double value = -(m.p_succ - kPenalty * (df * df + dg * dg));
    return std::isfinite(value) ? value : kHuge;
  };

  std::vector<double> x0{start.chi};
  std::vector<double> lo{0.0};
  std::vector<double> hi{kChiMax};
  if (!infinite) {
    x0.push_back(start.r);
    lo.push_back(0.0);
    hi.push_back(1.0);
  }
  NelderMeadOptions nm;
  nm.initial_step = 0.005;
  const auto result = nelder_mead(objective, x0, lo, hi, nm);
  const auto candidate = make_tradeoff_point(model, params_of(result.x));
  if (!satisfies(candidate, f_target, g_target, options)) return std::nullopt;
  return candidate;
}

}  // namespace

void SweepSpec::validate() const {
  if (chi_steps < 2 || r_steps < 2) throw InvalidParameter("sweep grids need at least 2 steps per axis");
  signal.validate();
}

double grid_chi(int i, int chi_steps) {
  return kChiMax * (static_cast<double>(i) / (chi_steps - 1));
}

double grid_r(int j, int r_steps) {
  return static_cast<double>(j) / (r_steps - 1);
}

TradeoffPoint make_tradeoff_point(const PerformanceModel& model, const AmplifierParams& params) {
  const auto m = model.evaluate(params);
  return {params.chi, params.r, m.fidelity, m.gain, m.p_succ, m.physical_filter};
}

std::vector<TradeoffPoint> grid_sweep(const PerformanceModel& model, int chi_steps, int r_steps) {
  if (chi_steps < 2 || r_steps < 2) throw InvalidParameter("sweep grids need at least 2 steps per axis");
  std::vector<TradeoffPoint> out(static_cast<std::size_t>(chi_steps) * r_steps);
  tbb::parallel_for(0, chi_steps, [&](int i) {
    const double chi = grid_chi(i, chi_steps);
    for (int j = 0; j < r_steps; ++j) {
      out[static_cast<std::size_t>(i) * r_steps + j] = make_tradeoff_point(model, {chi, grid_r(j, r_steps)});
    }
  });
  return out;
}

std::vector<TradeoffPoint> grid_sweep(const SweepSpec& spec) {
  spec.validate();
  FixedStateModel model(spec.signal, spec.feedforward);
  return grid_sweep(model, spec.chi_steps, spec.r_steps);
}

bool gain_satisfies(const Gain& gain, const Gain& target, const ConstraintOptions& options) {
  if (target.is_infinite()) return gain.is_infinite();
  return gain_violation_db(gain, target, options.gain_constraint) <= options.g_tol_db;
}

bool satisfies(const TradeoffPoint& point, double f_target, const Gain& g_target,
               const ConstraintOptions& options) {
  return point.fidelity && std::abs(*point.fidelity - f_target) <= options.f_tol &&
         gain_satisfies(point.gain, g_target, options);
}

ConstrainedOptimum max_psucc_at(double f_target, const Gain& g_target, const PerformanceModel& model,
                                std::span<const TradeoffPoint> grid, bool refine,
                                const ConstraintOptions& options) {
  return max_psucc_at(f_target, GainContour(model, g_target), model, grid, refine, options);
}

ConstrainedOptimum max_psucc_at(double f_target, const GainContour& contour, const PerformanceModel& model,
                                std::span<const TradeoffPoint> grid, bool refine,
                                const ConstraintOptions& options) {
  const Gain g_target = contour.target();
  if (!(f_target > 0.0 && f_target <= 1.0)) throw InvalidParameter("target fidelity must lie in (0, 1]");
  ConstrainedOptimum out;
  out.f_target = f_target;
  out.g_target = g_target;
  out.f_tol = options.f_tol;
  out.g_tol_db = options.g_tol_db;

  auto consider = [&](const TradeoffPoint& p) {
    if (!satisfies(p, f_target, g_target, options)) return;
    if (!out.reachable || p.p_succ > out.best.p_succ ||
        (p.p_succ == out.best.p_succ && std::pair(p.chi, p.r) < std::pair(out.best.chi, out.best.r))) {
      out.best = p;
      out.reachable = true;
    }
  };
  for (const auto& p : grid) consider(p);
  // A grid rarely lands inside both tolerance bands at once, so settings
  // that realize the target gain exactly are candidates too.
  if (const auto c = contour.best_at_fidelity(f_target, options.f_tol)) {
    consider(make_tradeoff_point(model, c->params));
  }
  if (out.reachable && refine) {
    if (auto better = refine_optimum(out.best, f_target, g_target, model, options);
        better && better->p_succ > out.best.p_succ) {
      out.best = *better;
    }
  }
  return out;
}

std::vector<ConstrainedOptimum> max_psucc_surface(std::span<const Gain> gains, std::span<const double> f_targets,
                                                  const PerformanceModel& model,
                                                  std::span<const TradeoffPoint> grid, bool refine,
                                                  const ConstraintOptions& options) {
  std::vector<ConstrainedOptimum> out(gains.size() * f_targets.size());
  for (std::size_t g = 0; g < gains.size(); ++g) {
    const GainContour contour(model, gains[g]);
    tbb::parallel_for(std::size_t{0}, f_targets.size(), [&](std::size_t i) {
      out[g * f_targets.size() + i] = max_psucc_at(f_targets[i], contour, model, grid, refine, options);
    });
  }
  return out;
}

ConstrainedOptimum max_psucc_at(double f_target, const Gain& g_target, const SweepSpec& spec, bool refine,
                                const ConstraintOptions& options) {
  spec.validate();
  FixedStateModel model(spec.signal, spec.feedforward);
  const auto grid = grid_sweep(model, spec.chi_steps, spec.r_steps);
  return max_psucc_at(f_target, g_target, model, grid, refine, options);
}

ThresholdPoint threshold(const PerformanceModel& model, const Gain& gain) {
  ThresholdPoint out;
  out.gain = gain;
  GainContour contour(model, gain);
  const auto best = contour.maximize([](const ContourPoint& p) -> std::optional<double> {
    if (!p.fidelity) return std::nullopt;
    return -*p.fidelity;
  });
  if (best) {
    out.f_min = best->fidelity;
    out.chi = best->params.chi;
    out.r = best->params.r;
  }
  return out;
}

std::vector<ThresholdPoint> threshold_curve(std::span<const Gain> gains, const SweepSpec& spec,
                                            const ConstraintOptions& options) {
  spec.validate();
  FixedStateModel model(spec.signal, spec.feedforward);
  std::vector<ThresholdPoint> out;
  if (options.gain_constraint == GainConstraint::Equality) {
    for (const auto& g : gains) out.push_back(threshold(model, g));
    return out;
  }
  const auto grid = grid_sweep(model, spec.chi_steps, spec.r_steps);
  for (const auto& g : gains) {
    ThresholdPoint t;
    t.gain = g;
    for (const auto& p : grid) {
      if (!p.fidelity || !gain_satisfies(p.gain, g, options)) continue;
      if (!t.f_min || *p.fidelity < *t.f_min) {
        t.f_min = p.fidelity;
        t.chi = p.chi;
        t.r = p.r;
      }
    }
    out.push_back(t);
  }
  return out;
}

}  // namespace qamp
