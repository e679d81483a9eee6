#pragma once

// Brute-force Fock-space simulation of the amplifier circuit.
//
// The state of the three photons (signal, two ancillas) is a sparse map from
// mode occupations to amplitudes. Each optical element is a linear map on
// creation operators; applying it expands every configuration exactly,
// including the sqrt(n!) factors of multiply occupied modes. Heralding keeps
// one photon in each detector and projects it onto |D> or |A>.
//
// Nothing here uses the closed-form x/y coefficients, so agreement with
// amplifier.hpp is an independent check of those formulas.

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qamp/amplifier.hpp"

namespace qamp::fock {

enum class Location : std::uint8_t { In, A1, A2, Out, D1, D2 };
enum class Polarization : std::uint8_t { H, V };

struct OpticalMode {
  Location location;
  Polarization polarization;

  constexpr std::size_t index() const {
    return 2 * static_cast<std::size_t>(location) + static_cast<std::size_t>(polarization);
  }
};

inline constexpr std::size_t kModeCount = 12;

using Occupation = std::array<std::uint8_t, kModeCount>;

Occupation occupation_of(std::initializer_list<OpticalMode> photons);
int photon_number(const Occupation& occupation);
int photons_at(const Occupation& occupation, Location location);

struct PhotonConfiguration {
  Occupation occupation{};
  Complex amplitude;
};

class Superposition {
 public:
  void add(const Occupation& occupation, Complex amplitude);
  Complex amplitude(const Occupation& occupation) const;
  double norm_sq() const;
  std::size_t size() const { return terms_.size(); }
  std::vector<PhotonConfiguration> configurations() const;
  const std::map<Occupation, Complex>& terms() const { return terms_; }

  // Drops terms with |amplitude| below the cutoff.
  void prune(double cutoff);

 private:
  std::map<Occupation, Complex> terms_;
};

// a^dagger_from -> sum_k coefficient_k a^dagger_{to_k}. Modes without a rule
// are left unchanged.
class ModeTransformation {
 public:
  explicit ModeTransformation(std::string name) : name_(std::move(name)) {}

  ModeTransformation& map(OpticalMode from,
                          std::initializer_list<std::pair<OpticalMode, double>> to);

  const std::string& name() const { return name_; }
  Superposition apply(const Superposition& state) const;

 private:
  std::string name_;
  std::array<std::vector<std::pair<std::size_t, double>>, kModeCount> images_{};
  std::array<bool, kModeCount> has_rule_{};
};

// Elements in propagation order: PBSin, PPBS1, PPBS2, PBSout.
std::vector<ModeTransformation> network_stages(double r);

enum class Projection { D, A };

struct DetectionPattern {
  Projection d1 = Projection::D;
  Projection d2 = Projection::D;
};

inline constexpr std::array<DetectionPattern, 4> kAllPatterns{{
    {Projection::D, Projection::D},
    {Projection::D, Projection::A},
    {Projection::A, Projection::D},
    {Projection::A, Projection::A},
}};

// Signal (In modes) times the ancilla pair (A1, A2 modes).
Superposition build_input(const SignalState& signal, double chi);

// Runs every stage of network_stages(r), pruning amplitudes below 1e-15.
Superposition apply_network(const Superposition& state, double r);

// Heralds on exactly one photon in D1 and in D2, projects them onto the
// pattern, and returns the Out-mode amplitudes. Equal-polarization patterns
// are tagged Out1, orthogonal ones Out2.
BranchAmplitudes postselect(const Superposition& state, DetectionPattern pattern);

// Metrics without filtration (phase flip only) assembled from all four
// detection patterns. Gains and transmittances come from auxiliary runs with
// H, V and the signal's own qubit injected at alpha = beta = 1/sqrt(2).
MetricSet oracle_metrics(const SignalState& signal, const AmplifierParams& params);

}  // namespace qamp::fock
