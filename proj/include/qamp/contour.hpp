#pragma once

// The set of device settings (chi, r) that realize one overall gain exactly.
// For finite G the condition T(u) = G u is a quadratic in u = r^2 at every
// chi, so the contour is traced root by root; for infinite gain it is the
// r = 0 line. Settings are sampled twice: along chi (two root branches) and
// along u (roots in chi), so vertical and horizontal tangents are both
// resolved.

#include <functional>
#include <optional>
#include <vector>

#include "qamp/model.hpp"

namespace qamp {

struct ContourPoint {
  AmplifierParams params;
  double p_succ = 0.0;
  std::optional<double> fidelity;
};

struct ContourOptions {
  int chi_samples = 1001;
  int u_samples = 1001;
  int chi_scan = 400;  // scan intervals when solving for chi at fixed u
};

class GainContour {
 public:
  GainContour(const PerformanceModel& model, Gain target, ContourOptions options = {});

  bool empty() const { return points_.empty(); }
  const std::vector<ContourPoint>& points() const { return points_; }
  Gain target() const { return target_; }

  // Largest score over the contour, polished by a bounded 1D search around
  // the best sample. Points with no score are skipped.
  using Score = std::function<std::optional<double>(const ContourPoint&)>;
  std::optional<ContourPoint> maximize(const Score& score) const;

  // Highest P among points whose fidelity lies within tol of f, including
  // the exact crossings below. Ties go to the lowest chi, then r.
  std::optional<ContourPoint> best_at_fidelity(double f, double tol) const;

  // Points where the fidelity equals f exactly, located by bisection along
  // each chi-parametrized branch.
  std::vector<ContourPoint> fidelity_crossings(double f) const;

 private:
  struct Source {
    bool along_chi;  // otherwise along u
    int index;       // chi or u sample index
    int branch;      // root number at that sample
  };

  std::optional<double> root_u(double chi, int branch) const;
  std::optional<ContourPoint> at_chi(double chi, int branch) const;
  std::optional<ContourPoint> at_u(double u, double chi_lo, double chi_hi) const;
  ContourPoint make_point(double chi, double u) const;
  double chi_sample(int i) const;
  double u_sample(int k) const;

  const PerformanceModel& model_;
  Gain target_;
  ContourOptions options_;
  std::vector<ContourPoint> points_;
  std::vector<Source> sources_;
  // chi_index_[branch][i] indexes points_, or -1
  std::vector<int> chi_index_[2];
};

}  // namespace qamp
