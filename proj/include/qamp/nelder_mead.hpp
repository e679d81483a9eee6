#pragma once

#include <functional>
#include <vector>

namespace qamp {

struct NelderMeadOptions {
  int max_iterations = 200;
  double initial_step = 0.02;
  double f_tolerance = 1e-15;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
};

// Minimizes f inside the box [lower, upper]; trial points are clamped to the box.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const std::vector<double>& lower,
                             const std::vector<double>& upper, NelderMeadOptions options = {});

}  // namespace qamp
