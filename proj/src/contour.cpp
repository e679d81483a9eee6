#include "qamp/contour.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <tbb/parallel_for.h>

#include "qamp/errors.hpp"

namespace qamp {

namespace {

constexpr double kChiMax = std::numbers::pi / 4;
constexpr double kNoScore = 1e300;
constexpr int kBrentBits = 40;

bool better(double score, const ContourPoint& p, double best_score, const ContourPoint& best) {
  if (score != best_score) return score > best_score;
  if (p.params.chi != best.params.chi) return p.params.chi < best.params.chi;
  return p.params.r < best.params.r;
}

bool higher_p(const ContourPoint& a, const ContourPoint& b) {
  if (a.p_succ != b.p_succ) return a.p_succ > b.p_succ;
  if (a.params.chi != b.params.chi) return a.params.chi < b.params.chi;
  return a.params.r < b.params.r;
}

}  // namespace

GainContour::GainContour(const PerformanceModel& model, Gain target, ContourOptions options)
    : model_(model), target_(target), options_(options) {
  if (options.chi_samples < 2 || options.u_samples < 1 || options.chi_scan < 1) {
    throw InvalidParameter("contour sampling needs at least two chi samples");
  }
  const int n_chi = options.chi_samples;
  const int n_branch = target.is_infinite() ? 1 : 2;

  std::vector<std::optional<ContourPoint>> by_chi(static_cast<std::size_t>(n_chi) * 2);
  tbb::parallel_for(0, n_chi, [&](int i) {
    for (int b = 0; b < n_branch; ++b) by_chi[2 * i + b] = at_chi(chi_sample(i), b);
  });
  for (int b = 0; b < 2; ++b) chi_index_[b].assign(n_chi, -1);
  for (int i = 0; i < n_chi; ++i) {
    for (int b = 0; b < n_branch; ++b) {
      if (!by_chi[2 * i + b]) continue;
      chi_index_[b][i] = static_cast<int>(points_.size());
      points_.push_back(*by_chi[2 * i + b]);
      sources_.push_back({true, i, b});
    }
  }
  if (target.is_infinite()) return;

  std::vector<std::vector<ContourPoint>> by_u(options.u_samples);
  tbb::parallel_for(0, options.u_samples, [&](int k) {
    const double u = u_sample(k);
    const double step = kChiMax / options_.chi_scan;
    for (int j = 0; j < options_.chi_scan; ++j) {
      const double lo = j * step;
      const double hi = j + 1 == options_.chi_scan ? kChiMax : (j + 1) * step;
      if (auto p = at_u(u, lo, hi)) by_u[k].push_back(*p);
    }
  });
  for (int k = 0; k < options.u_samples; ++k) {
    for (std::size_t m = 0; m < by_u[k].size(); ++m) {
      points_.push_back(by_u[k][m]);
      sources_.push_back({false, k, static_cast<int>(m)});
    }
  }
}

double GainContour::chi_sample(int i) const {
  return kChiMax * (static_cast<double>(i) / (options_.chi_samples - 1));
}

double GainContour::u_sample(int k) const {
  return static_cast<double>(k + 1) / options_.u_samples;
}

std::optional<double> GainContour::root_u(double chi, int branch) const {
  if (target_.is_infinite()) return branch == 0 ? std::optional<double>(0.0) : std::nullopt;
  const auto t = model_.transmission(chi);
  const double a = t.n2;
  const double b = t.n1 - target_.linear();
  const double c = t.n0;
  const double disc = b * b - 4 * a * c;
  if (disc < 0.0 || a <= 0.0) return std::nullopt;
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0) return std::nullopt;
  const double r1 = q / a;
  const double r2 = c / q;
  const double u = branch == 0 ? std::min(r1, r2) : std::max(r1, r2);
  if (!(u > 0.0) || u > 1.0 + 1e-12) return std::nullopt;
  return std::min(u, 1.0);
}

ContourPoint GainContour::make_point(double chi, double u) const {
  ContourPoint p;
  p.params = {std::clamp(chi, 0.0, kChiMax), std::sqrt(u)};
  p.p_succ = model_.success_probability(p.params);
  p.fidelity = model_.fidelity(p.params);
  return p;
}

std::optional<ContourPoint> GainContour::at_chi(double chi, int branch) const {
  const auto u = root_u(chi, branch);
  if (!u) return std::nullopt;
  return make_point(chi, *u);
}

std::optional<ContourPoint> GainContour::at_u(double u, double chi_lo, double chi_hi) const {
  const double g = target_.linear();
  auto h = [&](double chi) { return model_.transmission(chi)(u) - g * u; };
  const double h_lo = h(chi_lo);
  const double h_hi = h(chi_hi);
  if (h_lo == 0.0) return make_point(chi_lo, u);
  if (h_lo * h_hi > 0.0 || h_hi == 0.0) return std::nullopt;
  std::uintmax_t iterations = 100;
  auto [a, b] = boost::math::tools::toms748_solve(h, chi_lo, chi_hi, h_lo, h_hi,
                                                  boost::math::tools::eps_tolerance<double>(50), iterations);
  return make_point(0.5 * (a + b), u);
}

std::optional<ContourPoint> GainContour::maximize(const Score& score) const {
  int best_index = -1;
  double best_score = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto s = score(points_[i]);
    if (!s) continue;
    if (best_index < 0 || better(*s, points_[i], best_score, points_[best_index])) {
      best_index = static_cast<int>(i);
      best_score = *s;
    }
  }
  if (best_index < 0) return std::nullopt;

  ContourPoint best = points_[best_index];
  const Source src = sources_[best_index];
  std::optional<ContourPoint> polished;
  auto objective = [&](const std::optional<ContourPoint>& p) {
    if (!p) return kNoScore;
    const auto s = score(*p);
    return s ? -*s : kNoScore;
  };

  if (src.along_chi) {
    const double lo = chi_sample(std::max(src.index - 1, 0));
    const double hi = chi_sample(std::min(src.index + 1, options_.chi_samples - 1));
    auto f = [&](double chi) { return objective(at_chi(chi, src.branch)); };
    const auto [chi, value] = boost::math::tools::brent_find_minima(f, lo, hi, kBrentBits);
    if (value < kNoScore) polished = at_chi(chi, src.branch);
  } else {
    const double lo = u_sample(std::max(src.index - 1, 0));
    const double hi = u_sample(std::min(src.index + 1, options_.u_samples - 1));
    const double half = 2 * kChiMax / options_.chi_scan;
    const double chi_lo = std::max(best.params.chi - half, 0.0);
    const double chi_hi = std::min(best.params.chi + half, kChiMax);
    auto f = [&](double u) { return objective(at_u(u, chi_lo, chi_hi)); };
    const auto [u, value] = boost::math::tools::brent_find_minima(f, lo, hi, kBrentBits);
    if (value < kNoScore) polished = at_u(u, chi_lo, chi_hi);
  }
  if (polished) {
    const auto s = score(*polished);
    if (s && *s > best_score) best = *polished;
  }
  return best;
}

std::optional<ContourPoint> GainContour::best_at_fidelity(double f, double tol) const {
  std::optional<ContourPoint> best;
  auto consider = [&](const ContourPoint& p) {
    if (!p.fidelity || std::abs(*p.fidelity - f) > tol) return;
    if (!best || higher_p(p, *best)) best = p;
  };
  for (const auto& p : points_) consider(p);
  for (const auto& p : fidelity_crossings(f)) consider(p);
  return best;
}

std::vector<ContourPoint> GainContour::fidelity_crossings(double f) const {
  std::vector<ContourPoint> out;
  for (int b = 0; b < 2; ++b) {
    const auto& idx = chi_index_[b];
    for (int i = 0; i < options_.chi_samples; ++i) {
      if (idx[i] < 0 || !points_[idx[i]].fidelity) continue;
      const double d0 = *points_[idx[i]].fidelity - f;
      if (d0 == 0.0) {
        out.push_back(points_[idx[i]]);
        continue;
      }
      if (i + 1 >= options_.chi_samples || idx[i + 1] < 0 || !points_[idx[i + 1]].fidelity) continue;
      const double d1 = *points_[idx[i + 1]].fidelity - f;
      if (d0 * d1 >= 0.0) continue;

      bool broken = false;
      auto g = [&](double chi) {
        const auto p = at_chi(chi, b);
        if (!p || !p->fidelity) {
          broken = true;
          return d0;
        }
        return *p->fidelity - f;
      };
      std::uintmax_t iterations = 100;
      auto [lo, hi] = boost::math::tools::toms748_solve(g, chi_sample(i), chi_sample(i + 1), d0, d1,
                                                        boost::math::tools::eps_tolerance<double>(50),
                                                        iterations);
      if (broken) continue;
      if (auto p = at_chi(0.5 * (lo + hi), b)) out.push_back(*p);
    }
  }
  return out;
}

}  // namespace qamp
