#include "qamp/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qamp {

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const std::vector<double>& lower,
                             const std::vector<double>& upper, NelderMeadOptions options) {
  const std::size_t n = start.size();
  auto clamp = [&](std::vector<double> x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
    return x;
  };
  auto vertex = [&](std::vector<double> x) {
    x = clamp(std::move(x));
    const double v = f(x);
    return Vertex{std::move(x), v};
  };
  // x0 + t (x1 - x0)
  auto along = [n](const std::vector<double>& x0, const std::vector<double>& x1, double t) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x0[i] + t * (x1[i] - x0[i]);
    return y;
  };

  std::vector<Vertex> simplex;
  simplex.push_back(vertex(start));
  for (std::size_t i = 0; i < n; ++i) {
    auto x = clamp(start);
    // step inward when the start sits on the upper bound
    x[i] += (x[i] + options.initial_step <= upper[i]) ? options.initial_step : -options.initial_step;
    simplex.push_back(vertex(std::move(x)));
  }

  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    if (std::abs(simplex.back().f - simplex.front().f) <= options.f_tolerance) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k].x[i] / static_cast<double>(n);
    }
    Vertex& worst = simplex.back();
    const Vertex reflected = vertex(along(worst.x, centroid, 2.0));
    if (reflected.f < simplex.front().f) {
      Vertex expanded = vertex(along(worst.x, centroid, 3.0));
      worst = expanded.f < reflected.f ? std::move(expanded) : reflected;
    } else if (reflected.f < simplex[n - 1].f) {
      worst = reflected;
    } else {
      const bool outside = reflected.f < worst.f;
      Vertex contracted = vertex(outside ? along(worst.x, centroid, 1.5) : along(worst.x, centroid, 0.5));
      if (contracted.f < std::min(worst.f, reflected.f)) {
        worst = std::move(contracted);
      } else {
        for (std::size_t k = 1; k <= n; ++k) simplex[k] = vertex(along(simplex[0].x, simplex[k].x, 0.5));
      }
    }
  }
  std::stable_sort(simplex.begin(), simplex.end(), by_value);
  return {simplex.front().x, simplex.front().f, it};
}

}  // namespace qamp
