#include "qamp/fock_oracle.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace qamp::fock {

namespace {

constexpr double kPruneCutoff = 1e-15;

constexpr OpticalMode mode(Location l, Polarization p) { return {l, p}; }

constexpr OpticalMode kInH = mode(Location::In, Polarization::H);
constexpr OpticalMode kInV = mode(Location::In, Polarization::V);
constexpr OpticalMode kA1H = mode(Location::A1, Polarization::H);
constexpr OpticalMode kA1V = mode(Location::A1, Polarization::V);
constexpr OpticalMode kA2H = mode(Location::A2, Polarization::H);
constexpr OpticalMode kA2V = mode(Location::A2, Polarization::V);
constexpr OpticalMode kOutH = mode(Location::Out, Polarization::H);
constexpr OpticalMode kOutV = mode(Location::Out, Polarization::V);
constexpr OpticalMode kD1H = mode(Location::D1, Polarization::H);
constexpr OpticalMode kD1V = mode(Location::D1, Polarization::V);
constexpr OpticalMode kD2H = mode(Location::D2, Polarization::H);
constexpr OpticalMode kD2V = mode(Location::D2, Polarization::V);

// <P|pol> for the diagonal/anti-diagonal projections.
double projection_overlap(Projection p, Polarization pol) {
  const double half = std::numbers::sqrt2 / 2;
  if (p == Projection::A && pol == Polarization::V) return -half;
  return half;
}

// Polarization of the single photon at a detector location.
Polarization detector_polarization(const Occupation& occ, Location l) {
  return occ[mode(l, Polarization::H).index()] == 1 ? Polarization::H : Polarization::V;
}

struct PatternRun {
  std::array<BranchAmplitudes, kAllPatterns.size()> branches;

  static PatternRun of(const SignalState& signal, const AmplifierParams& params) {
    const auto out = apply_network(build_input(signal, params.chi), params.r);
    PatternRun run;
    for (std::size_t i = 0; i < kAllPatterns.size(); ++i) run.branches[i] = postselect(out, kAllPatterns[i]);
    return run;
  }

  double vacuum_weight() const {
    return std::accumulate(branches.begin(), branches.end(), 0.0,
                           [](double acc, const BranchAmplitudes& b) { return acc + std::norm(b.vac); });
  }
  double qubit_weight() const {
    return std::accumulate(branches.begin(), branches.end(), 0.0,
                           [](double acc, const BranchAmplitudes& b) { return acc + b.qubit_norm_sq(); });
  }
};

SignalState probe(double theta, double phi) {
  return SignalState::from_populations(0.5, theta, phi);
}

Gain ratio_gain(const PatternRun& run, const AmplifierParams& params) {
  if (params.r == 0.0) return Gain::infinite();
  // alpha = beta, so the input qubit/vacuum ratio is 1.
  return Gain::finite(run.qubit_weight() / run.vacuum_weight());
}

}  // namespace

Occupation occupation_of(std::initializer_list<OpticalMode> photons) {
  Occupation occ{};
  for (const auto& m : photons) ++occ[m.index()];
  return occ;
}

int photon_number(const Occupation& occupation) {
  return std::accumulate(occupation.begin(), occupation.end(), 0);
}

int photons_at(const Occupation& occupation, Location location) {
  return occupation[mode(location, Polarization::H).index()] +
         occupation[mode(location, Polarization::V).index()];
}

void Superposition::add(const Occupation& occupation, Complex amplitude) {
  terms_[occupation] += amplitude;
}

Complex Superposition::amplitude(const Occupation& occupation) const {
  auto it = terms_.find(occupation);
  return it == terms_.end() ? Complex{} : it->second;
}

double Superposition::norm_sq() const {
  double total = 0.0;
  for (const auto& [occ, amp] : terms_) total += std::norm(amp);
  return total;
}

std::vector<PhotonConfiguration> Superposition::configurations() const {
  std::vector<PhotonConfiguration> out;
  out.reserve(terms_.size());
  for (const auto& [occ, amp] : terms_) out.push_back({occ, amp});
  return out;
}

void Superposition::prune(double cutoff) {
  std::erase_if(terms_, [cutoff](const auto& kv) { return std::abs(kv.second) < cutoff; });
}

ModeTransformation& ModeTransformation::map(
    OpticalMode from, std::initializer_list<std::pair<OpticalMode, double>> to) {
  auto& image = images_[from.index()];
  image.clear();
  for (const auto& [m, coeff] : to) image.emplace_back(m.index(), coeff);
  has_rule_[from.index()] = true;
  return *this;
}

Superposition ModeTransformation::apply(const Superposition& state) const {
  Superposition result;
  for (const auto& [occ, amp] : state.terms()) {
    // |n> = prod_m (a^dag_m)^{n_m} / sqrt(n_m!) |0>. Re-create every photon
    // through its image, picking up sqrt(n_k + 1) per creation.
    double inv_norm = 1.0;
    for (auto n : occ) inv_norm /= std::sqrt(std::tgamma(n + 1.0));

    std::map<Occupation, Complex> partial{{Occupation{}, amp * inv_norm}};
    for (std::size_t m = 0; m < kModeCount; ++m) {
      for (int photon = 0; photon < occ[m]; ++photon) {
        std::map<Occupation, Complex> next;
        for (const auto& [p_occ, p_amp] : partial) {
          if (!has_rule_[m]) {
            Occupation o = p_occ;
            const double boson = std::sqrt(o[m] + 1.0);
            ++o[m];
            next[o] += p_amp * boson;
            continue;
          }
          for (const auto& [k, coeff] : images_[m]) {
            Occupation o = p_occ;
            const double boson = std::sqrt(o[k] + 1.0);
            ++o[k];
            next[o] += p_amp * coeff * boson;
          }
        }
        partial = std::move(next);
      }
    }
    for (const auto& [o, a] : partial) result.add(o, a);
  }
  return result;
}

std::vector<ModeTransformation> network_stages(double r) {
  const double t = std::sqrt(1.0 - r * r);
  std::vector<ModeTransformation> stages;

  // The In location doubles as the PPBS input ports: PBSin sends In,H to PPBS1
  // and In,V to PPBS2 without changing the mode label.
  stages.emplace_back("PBSin");
  stages.back().map(kInH, {{kInH, 1.0}}).map(kInV, {{kInV, 1.0}});

  // Reflectivity r for H, full reflection of V.
  stages.emplace_back("PPBS1");
  stages.back()
      .map(kInH, {{kOutH, r}, {kD1H, t}})
      .map(kA1H, {{kD1H, -r}, {kOutH, t}})
      .map(kA1V, {{kD1V, -1.0}});

  // Same element with H and V exchanged.
  stages.emplace_back("PPBS2");
  stages.back()
      .map(kInV, {{kOutV, r}, {kD2V, t}})
      .map(kA2V, {{kD2V, -r}, {kOutV, t}})
      .map(kA2H, {{kD2H, -1.0}});

  // Out,H from PPBS1 and Out,V from PPBS2 merge into the single Out location.
  stages.emplace_back("PBSout");
  stages.back().map(kOutH, {{kOutH, 1.0}}).map(kOutV, {{kOutV, 1.0}});
  return stages;
}

Superposition build_input(const SignalState& signal, double chi) {
  const Complex h = signal.beta * std::cos(signal.theta / 2);
  const Complex v = signal.beta * std::sin(signal.theta / 2) * std::polar(1.0, signal.phi);
  const double hh = std::cos(chi);
  const double vv = std::sin(chi);

  Superposition state;
  const std::array<std::pair<double, std::pair<OpticalMode, OpticalMode>>, 2> ancilla{{
      {hh, {kA1H, kA2H}},
      {vv, {kA1V, kA2V}},
  }};
  for (const auto& [a_amp, pair] : ancilla) {
    const auto [m1, m2] = pair;
    state.add(occupation_of({m1, m2}), signal.alpha * a_amp);
    state.add(occupation_of({kInH, m1, m2}), h * a_amp);
    state.add(occupation_of({kInV, m1, m2}), v * a_amp);
  }
  state.prune(kPruneCutoff);
  return state;
}

Superposition apply_network(const Superposition& state, double r) {
  Superposition current = state;
  for (const auto& stage : network_stages(r)) {
    current = stage.apply(current);
    current.prune(kPruneCutoff);
  }
  return current;
}

BranchAmplitudes postselect(const Superposition& state, DetectionPattern pattern) {
  BranchAmplitudes out;
  out.branch = pattern.d1 == pattern.d2 ? Branch::Out1 : Branch::Out2;
  for (const auto& [occ, amp] : state.terms()) {
    if (photons_at(occ, Location::D1) != 1 || photons_at(occ, Location::D2) != 1) continue;
    if (photons_at(occ, Location::In) + photons_at(occ, Location::A1) + photons_at(occ, Location::A2) != 0) continue;
    const double weight = projection_overlap(pattern.d1, detector_polarization(occ, Location::D1)) *
                          projection_overlap(pattern.d2, detector_polarization(occ, Location::D2));
    const int n_out = photons_at(occ, Location::Out);
    if (n_out == 0) {
      out.vac += amp * weight;
    } else if (n_out == 1) {
      if (occ[kOutH.index()] == 1) {
        out.h += amp * weight;
      } else {
        out.v += amp * weight;
      }
    }
  }
  return out;
}

MetricSet oracle_metrics(const SignalState& signal, const AmplifierParams& params) {
  MetricSet m;
  m.feedforward = FeedForward::Off;

  const auto run = PatternRun::of(signal, params);
  m.p_succ = run.vacuum_weight() + run.qubit_weight();

  if (signal.beta_sq() > 0.0) {
    // Balanced mixture of all heralded qubit parts, V -> -V on orthogonal
    // coincidences; <Q|rho|Q> / tr(rho).
    const Complex qh = std::cos(signal.theta / 2);
    const Complex qv = std::sin(signal.theta / 2) * std::polar(1.0, signal.phi);
    double overlap = 0.0;
    double trace = 0.0;
    for (const auto& b : run.branches) {
      const Complex v = b.branch == Branch::Out2 ? -b.v : b.v;
      overlap += std::norm(std::conj(qh) * b.h + std::conj(qv) * v);
      trace += std::norm(b.h) + std::norm(v);
    }
    // trace = |beta|^2 / 2 times the closed-form denominator.
    if (trace >= kDegenerateCutoff * signal.beta_sq() / 2) m.fidelity = overlap / trace;
  }

  const auto h_run = PatternRun::of(probe(0.0, 0.0), params);
  const auto v_run = PatternRun::of(probe(std::numbers::pi, 0.0), params);
  m.g_h = ratio_gain(h_run, params);
  m.g_v = ratio_gain(v_run, params);
  m.g_overall = ratio_gain(PatternRun::of(probe(signal.theta, signal.phi), params), params);

  // tau = (orthogonal-coincidence amplitude, flipped) / (equal-coincidence amplitude).
  const Complex h_dd = h_run.branches[0].h;
  const Complex h_da = h_run.branches[1].h;
  const Complex v_dd = v_run.branches[0].v;
  const Complex v_da = -v_run.branches[1].v;
  const double cut = kDegenerateCutoff / (2 * std::numbers::sqrt2);  // probe amplitude is x / (2 sqrt 2)
  if (std::abs(h_dd) >= cut && std::abs(v_dd) >= cut) {
    m.physical_filter = std::abs(h_da / h_dd) <= 1.0 && std::abs(v_da / v_dd) <= 1.0;
  }
  return m;
}

}  // namespace qamp::fock
