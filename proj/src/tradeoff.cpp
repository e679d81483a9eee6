#include "qamp/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <tbb/parallel_for.h>

#include "qamp/errors.hpp"

namespace qamp {

namespace {

CurvePoint from_contour(const ContourPoint& p, double f_target, const PerformanceModel& model) {
  CurvePoint c;
  c.f_target = f_target;
  c.f = p.fidelity;
  c.p = p.p_succ;
  c.chi = p.params.chi;
  c.r = p.params.r;
  c.gain = model.gain(p.params);
  c.reachable = true;
  return c;
}

CurvePoint from_tradeoff(const TradeoffPoint& p, double f_target) {
  return {f_target, p.fidelity, p.p_succ, p.chi, p.r, p.gain, true};
}

CurvePoint unreachable(double f_target, const Gain& gain) {
  CurvePoint c;
  c.f_target = f_target;
  c.gain = gain;
  return c;
}

}  // namespace

void CurveSpec::validate() const {
  if (const auto* prior = std::get_if<vmf::KnowledgePrior>(&input)) {
    prior->validate();
  } else {
    const double theta = std::get<FixedTheta>(input).theta;
    if (!(theta >= 0.0 && theta <= std::numbers::pi + 1e-12)) {
      throw InvalidParameter("theta must satisfy 0 <= theta <= pi");
    }
  }
  if (!(beta_sq >= 0.0 && beta_sq <= 1.0)) throw InvalidParameter("|beta|^2 must lie in [0, 1]");
  if (f_grid.empty() && f_points < 2) throw InvalidParameter("a fidelity grid needs at least 2 points");
  for (std::size_t i = 0; i < f_grid.size(); ++i) {
    if (!(f_grid[i] > 0.0 && f_grid[i] <= 1.0)) throw InvalidParameter("fidelity targets must lie in (0, 1]");
    if (i > 0 && !(f_grid[i] > f_grid[i - 1])) {
      throw InvalidParameter("fidelity targets must be strictly increasing");
    }
  }
  if (chi_steps < 2 || r_steps < 2) throw InvalidParameter("sweep grids need at least 2 steps per axis");
  quad.validate();
}

std::unique_ptr<PerformanceModel> make_model(const CurveSpec& spec) {
  if (const auto* prior = std::get_if<vmf::KnowledgePrior>(&spec.input)) {
    return std::make_unique<PriorAveragedModel>(*prior, spec.beta_sq, spec.feedforward, spec.quad);
  }
  const double theta = std::min(std::get<FixedTheta>(spec.input).theta, std::numbers::pi);
  return std::make_unique<FixedStateModel>(SignalState::from_populations(spec.beta_sq, theta),
                                           spec.feedforward);
}

std::vector<CurvePoint> infinite_gain_curve(double theta, double beta_sq, int chi_steps) {
  if (chi_steps < 2) throw InvalidParameter("the curve needs at least 2 chi steps");
  SignalState::from_populations(beta_sq, theta).validate();
  std::vector<CurvePoint> out;
  out.reserve(chi_steps);
  for (int i = 0; i < chi_steps; ++i) {
    const double chi = grid_chi(i, chi_steps);
    CurvePoint c;
    c.chi = chi;
    c.gain = Gain::infinite();
    try {
      const auto m = infinite_gain_metrics(beta_sq, theta, chi);
      c.f = m.fidelity;
      c.f_target = m.fidelity;
      c.p = m.p_succ;
      c.reachable = true;
    } catch (const EmptyQubitSubspace&) {
      c.f_target = 0.0;
    }
    out.push_back(c);
  }
  return out;
}

std::vector<double> default_f_grid(const PerformanceModel& model, const Gain& gain, int points) {
  const auto t = threshold(model, gain);
  std::vector<double> grid(points);
  if (!t.f_min || *t.f_min >= 1.0) {
    for (int i = 0; i < points; ++i) grid[i] = static_cast<double>(i + 1) / points;
    return grid;
  }
  const double lo = *t.f_min;
  for (int i = 0; i < points; ++i) grid[i] = lo + (1.0 - lo) * i / (points - 1);
  grid.back() = 1.0;
  return grid;
}

std::vector<CurvePoint> averaged_tradeoff_curve(const CurveSpec& spec) {
  spec.validate();
  const auto model = make_model(spec);
  const auto f_grid = spec.f_grid.empty() ? default_f_grid(*model, spec.g_target, spec.f_points) : spec.f_grid;
  std::vector<CurvePoint> out(f_grid.size());

  if (spec.constraints.gain_constraint == GainConstraint::LowerBound) {
    const auto grid = grid_sweep(*model, spec.chi_steps, spec.r_steps);
    tbb::parallel_for(std::size_t{0}, f_grid.size(), [&](std::size_t i) {
      const auto opt = max_psucc_at(f_grid[i], spec.g_target, *model, grid, true, spec.constraints);
      out[i] = opt.reachable ? from_tradeoff(opt.best, f_grid[i]) : unreachable(f_grid[i], spec.g_target);
    });
    return out;
  }

  const GainContour contour(*model, spec.g_target);
  tbb::parallel_for(std::size_t{0}, f_grid.size(), [&](std::size_t i) {
    const auto best = contour.best_at_fidelity(f_grid[i], spec.constraints.f_tol);
    out[i] = best ? from_contour(*best, f_grid[i], *model) : unreachable(f_grid[i], spec.g_target);
  });
  return out;
}

CurvePoint max_probability_point(const CurveSpec& spec) {
  spec.validate();
  const auto model = make_model(spec);
  const GainContour contour(*model, spec.g_target);
  const auto best = contour.maximize([](const ContourPoint& p) -> std::optional<double> { return p.p_succ; });
  if (!best) return unreachable(1.0, spec.g_target);
  return from_contour(*best, best->fidelity.value_or(0.0), *model);
}

MeritResult merit(const CurveSpec& spec) {
  spec.validate();
  const auto model = make_model(spec);
  MeritResult out;

  if (spec.constraints.gain_constraint == GainConstraint::LowerBound) {
    const auto grid = grid_sweep(*model, spec.chi_steps, spec.r_steps);
    const auto unit = max_psucc_at(1.0, spec.g_target, *model, grid, true, spec.constraints);
    if (!unit.reachable || unit.best.p_succ <= 0.0) {
      throw UnreachableUnitFidelity("no setting reaches unit fidelity at gain " + spec.g_target.to_string());
    }
    out.unit = from_tradeoff(unit.best, 1.0);
    out.best = out.unit;
    double best_pf = out.unit.p * out.unit.f.value_or(0.0);
    for (const auto& p : grid) {
      if (!p.fidelity || !gain_satisfies(p.gain, spec.g_target, spec.constraints)) continue;
      if (p.p_succ * *p.fidelity > best_pf) {
        best_pf = p.p_succ * *p.fidelity;
        out.best = from_tradeoff(p, *p.fidelity);
      }
    }
    out.merit = best_pf / out.unit.p;
    return out;
  }

  const GainContour contour(*model, spec.g_target);
  const auto unit = contour.best_at_fidelity(1.0, kUnitFidelityTol);
  if (!unit || unit->p_succ <= 0.0) {
    throw UnreachableUnitFidelity("no setting reaches unit fidelity at gain " + spec.g_target.to_string());
  }
  out.unit = from_contour(*unit, 1.0, *model);
  out.best = out.unit;
  double best_pf = unit->p_succ * *unit->fidelity;
  const auto top = contour.maximize([](const ContourPoint& p) -> std::optional<double> {
    if (!p.fidelity) return std::nullopt;
    return p.p_succ * *p.fidelity;
  });
  if (top && top->p_succ * *top->fidelity > best_pf) {
    best_pf = top->p_succ * *top->fidelity;
    out.best = from_contour(*top, *top->fidelity, *model);
  }
  out.merit = best_pf / unit->p_succ;
  return out;
}

}  // namespace qamp
