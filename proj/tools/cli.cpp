#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "qamp/amplifier.hpp"
#include "qamp/errors.hpp"
#include "qamp/fock_oracle.hpp"
#include "qamp/sweep.hpp"
#include "qamp/tradeoff.hpp"
#include "qamp/vmf.hpp"
#include "table.hpp"

namespace qamp::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kVerifyTolerance = 1e-12;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
               item.end());
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid " + what + ": '" + s + "'");
  }
}

Gain parse_gain(const std::string& s) {
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "inf" || lower == "infinity") return Gain::infinite();
  return Gain::from_db(parse_number(s, "gain (dB or 'inf')"));
}

std::vector<Gain> parse_gains(const std::string& s) {
  std::vector<Gain> out;
  for (const auto& item : split(s)) out.push_back(parse_gain(item));
  if (out.empty()) throw UsageError("empty gain list");
  return out;
}

std::vector<double> parse_numbers(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(s)) out.push_back(parse_number(item, what));
  if (out.empty()) throw UsageError("empty " + what + " list");
  return out;
}

double pi_units(double radians) { return radians / kPi; }

// Options shared by all table-producing subcommands.
struct OutputOptions {
  std::string format = "csv";
  std::string path;

  void attach(CLI::App* app) {
    app->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--output,-o", path, "Write to this file instead of stdout");
  }
};

void emit(const Table& table, const OutputOptions& opts, std::ostream& out) {
  const Format format = opts.format == "json" ? Format::Json : Format::Csv;
  if (opts.path.empty()) {
    table.write(out, format);
    return;
  }
  std::ofstream file(opts.path, std::ios::binary);
  if (!file) throw UsageError("cannot open output file '" + opts.path + "'");
  table.write(file, format);
}

// --- metrics ---------------------------------------------------------------

struct MetricsOptions {
  double chi = 0.0;
  double r = 1.0;
  double theta = 0.0;
  double phi = 0.0;
  double beta2 = 0.5;
  bool ff = false;
  bool no_ff = false;
  OutputOptions output;
};

Table metrics_table(const MetricsOptions& o) {
  const AmplifierParams params{o.chi * kPi, o.r};
  params.validate();
  auto signal = SignalState::from_populations(o.beta2, o.theta * kPi, o.phi * kPi);
  signal.validate();
  const auto tau = filter_transmittances(params);

  Table t({"feedforward", "p_succ", "g_h", "g_v", "gain", "gain_db", "fidelity", "tau_h", "tau_v",
           "physical_filter"});
  std::vector<FeedForward> modes;
  if (o.ff || !o.no_ff) modes.push_back(FeedForward::On);
  if (o.no_ff || !o.ff) modes.push_back(FeedForward::Off);
  for (auto ff : modes) {
    const auto m = evaluate(signal, params, ff);
    t.add_row({ff == FeedForward::On, m.p_succ, gain_cell(m.g_h), gain_cell(m.g_v), gain_cell(m.g_overall),
               gain_db_cell(m.g_overall), optional_cell(m.fidelity), optional_cell(tau.tau_h),
               optional_cell(tau.tau_v), m.physical_filter});
  }
  return t;
}

// --- verify ----------------------------------------------------------------

struct VerifyOptions {
  int n = 1000;
  std::uint64_t seed = 42;
  std::optional<double> chi, r, theta;
  double beta2 = 0.5;
  double phi = 0.0;
};

struct Draw {
  SignalState signal;
  AmplifierParams params;
};

std::string pattern_name(const fock::DetectionPattern& p) {
  auto c = [](fock::Projection x) { return x == fock::Projection::D ? 'D' : 'A'; };
  return {c(p.d1), c(p.d2)};
}

std::string describe(const Draw& d) {
  std::ostringstream os;
  os << std::setprecision(17) << "chi=" << d.params.chi << " r=" << d.params.r << " theta=" << d.signal.theta
     << " phi=" << d.signal.phi << " |beta|^2=" << d.signal.beta_sq() << " arg(alpha)=" << std::arg(d.signal.alpha)
     << " arg(beta)=" << std::arg(d.signal.beta);
  return os.str();
}

double relative_gain_diff(const Gain& a, const Gain& b) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() == b.is_infinite() ? 0.0 : INFINITY;
  return std::abs(a.linear() - b.linear()) / std::max(1.0, std::abs(b.linear()));
}

int run_verify(const VerifyOptions& o, std::ostream& out) {
  std::vector<Draw> draws;
  const bool fixed = o.chi || o.r || o.theta;
  if (fixed) {
    Draw d;
    d.params = {o.chi.value_or(0.0) * kPi, o.r.value_or(1.0)};
    d.signal = SignalState::from_populations(o.beta2, o.theta.value_or(0.0) * kPi, o.phi * kPi);
    d.params.validate();
    d.signal.validate();
    draws.push_back(d);
  } else {
    if (o.n < 1) throw UsageError("--n must be positive");
    std::mt19937_64 rng(o.seed);
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    for (int i = 0; i < o.n; ++i) {
      Draw d;
      d.params = {uniform(0.0, kPi / 4), uniform(0.0, 1.0)};
      const double beta_sq = uniform(0.0, 1.0);
      d.signal.alpha = std::polar(std::sqrt(1.0 - beta_sq), uniform(0.0, 2 * kPi));
      d.signal.beta = std::polar(std::sqrt(beta_sq), uniform(0.0, 2 * kPi));
      d.signal.theta = uniform(0.0, kPi);
      d.signal.phi = uniform(0.0, 2 * kPi);
      draws.push_back(d);
    }
  }

  double worst_amp = 0.0;
  double worst_metric = 0.0;
  std::optional<Draw> offender;
  for (const auto& d : draws) {
    const auto state = fock::apply_network(fock::build_input(d.signal, d.params.chi), d.params.r);
    const auto [e1, e2] = branch_states(d.signal, d.params);
    double amp = 0.0;
    for (const auto& pattern : fock::kAllPatterns) {
      const auto got = fock::postselect(state, pattern);
      const auto& want = got.branch == Branch::Out1 ? e1 : e2;
      amp = std::max({amp, std::abs(got.vac - want.vac), std::abs(got.h - want.h), std::abs(got.v - want.v)});
      if (fixed) {
        out << "pattern " << pattern_name(pattern) << ": vac " << format_number(got.vac.real()) << " h "
            << format_number(got.h.real()) << " v " << format_number(got.v.real()) << "\n";
      }
    }
    const auto om = fock::oracle_metrics(d.signal, d.params);
    const auto cm = evaluate(d.signal, d.params, FeedForward::Off);
    double metric = std::abs(om.p_succ - cm.p_succ);
    metric = std::max({metric, relative_gain_diff(om.g_h, cm.g_h), relative_gain_diff(om.g_v, cm.g_v),
                       relative_gain_diff(om.g_overall, cm.g_overall)});
    if (om.fidelity.has_value() != cm.fidelity.has_value()) {
      metric = INFINITY;
    } else if (om.fidelity) {
      metric = std::max(metric, std::abs(*om.fidelity - *cm.fidelity));
    }
    if (om.physical_filter != cm.physical_filter) metric = INFINITY;

    if (!offender && (amp > kVerifyTolerance || metric > kVerifyTolerance)) offender = d;
    worst_amp = std::max(worst_amp, amp);
    worst_metric = std::max(worst_metric, metric);
  }

  const double worst = std::max(worst_amp, worst_metric);
  out << "draws: " << draws.size() << "\n";
  if (!fixed) out << "seed: " << o.seed << "\n";
  out << "max |delta| branch amplitudes: " << format_number(worst_amp) << "\n";
  out << "max |delta| metrics (no feed-forward): " << format_number(worst_metric) << "\n";
  if (offender) {
    out << "max |delta| = " << format_number(worst) << " > 1e-12, FAIL\n";
    out << "first offending draw: " << describe(*offender) << "\n";
    return 1;
  }
  out << "max |delta| = " << format_number(worst) << " <= 1e-12, PASS\n";
  return 0;
}

// --- shared input description ------------------------------------------------

struct InputOptions {
  std::optional<double> theta;
  std::optional<double> kappa;
  double beta2 = 0.5;
  bool no_ff = false;
  int quad_nodes = 256;

  void attach(CLI::App* app, bool allow_kappa) {
    auto* th = app->add_option("--theta", theta, "Polar angle of the input state, in units of pi");
    if (allow_kappa) {
      auto* k = app->add_option("--kappa", kappa, "Concentration of the vMF prior (instead of --theta)");
      th->excludes(k);
      app->add_option("--quad-nodes", quad_nodes, "Gauss-Legendre nodes for prior averages");
    }
    app->add_option("--beta2", beta2, "Qubit population |beta|^2");
    app->add_flag("--no-ff", no_ff, "Disable feed-forward filtration");
  }

  FeedForward ff() const { return no_ff ? FeedForward::Off : FeedForward::On; }

  InputKnowledge knowledge() const {
    if (kappa) return vmf::KnowledgePrior{*kappa};
    return FixedTheta{theta.value_or(0.0) * kPi};
  }

  std::unique_ptr<PerformanceModel> model() const {
    if (kappa) return std::make_unique<PriorAveragedModel>(vmf::KnowledgePrior{*kappa}, beta2, ff(),
                                                           vmf::QuadratureSpec{quad_nodes});
    auto signal = SignalState::from_populations(beta2, theta.value_or(0.0) * kPi);
    return std::make_unique<FixedStateModel>(signal, ff());
  }
};

struct GridOptions {
  int chi_steps = 401;
  int r_steps = 401;
  bool lower_bound = false;
  double f_tol = 5e-4;
  double g_tol = 0.05;

  void attach(CLI::App* app, bool constraints) {
    app->add_option("--chi-steps", chi_steps, "Grid points in chi over [0, pi/4]");
    app->add_option("--r-steps", r_steps, "Grid points in r over [0, 1]");
    if (constraints) {
      app->add_flag("--lower-bound", lower_bound, "Treat the gain target as a lower bound");
      app->add_option("--f-tol", f_tol, "Fidelity tolerance");
      app->add_option("--g-tol", g_tol, "Gain tolerance in dB");
    }
  }

  ConstraintOptions constraints() const {
    ConstraintOptions c;
    c.f_tol = f_tol;
    c.g_tol_db = g_tol;
    c.gain_constraint = lower_bound ? GainConstraint::LowerBound : GainConstraint::Equality;
    return c;
  }
};

Cell angle_cell(double radians) { return pi_units(radians); }

// --- sweep -------------------------------------------------------------------

struct SweepOptions {
  InputOptions input;
  GridOptions grid;
  bool surface = false;
  std::string gains = "3,10,20,inf";
  int f_points = 101;
  double f_min = 0.5;
  bool refine = true;
  OutputOptions output;
};

Table sweep_table(const SweepOptions& o) {
  const auto model = o.input.model();
  const auto grid = grid_sweep(*model, o.grid.chi_steps, o.grid.r_steps);
  if (!o.surface) {
    Table t({"chi", "r", "fidelity", "gain", "gain_db", "p_succ", "physical"});
    for (const auto& p : grid) {
      t.add_row({angle_cell(p.chi), p.r, optional_cell(p.fidelity), gain_cell(p.gain), gain_db_cell(p.gain),
                 p.p_succ, p.physical_filter});
    }
    return t;
  }
  if (o.f_points < 2) throw UsageError("--f-points must be at least 2");
  if (!(o.f_min > 0.0 && o.f_min < 1.0)) throw UsageError("--f-min must lie in (0, 1)");
  Table t({"gain_db", "f_target", "p_succ", "chi", "r", "fidelity", "gain", "physical", "reachable"});
  const auto gains = parse_gains(o.gains);
  std::vector<double> targets;
  for (int i = 0; i < o.f_points; ++i) targets.push_back(o.f_min + (1.0 - o.f_min) * i / (o.f_points - 1));
  const auto surface = max_psucc_surface(gains, targets, *model, grid, o.refine, o.grid.constraints());
  for (std::size_t k = 0; k < surface.size(); ++k) {
    const auto& opt = surface[k];
    const Cell g = gain_db_cell(opt.g_target);
    if (!opt.reachable) {
      t.add_row({g, opt.f_target, NotAvailable{}, NotAvailable{}, NotAvailable{}, NotAvailable{}, NotAvailable{},
                 NotAvailable{}, false});
      continue;
    }
    const auto& b = opt.best;
    t.add_row({g, opt.f_target, b.p_succ, angle_cell(b.chi), b.r, optional_cell(b.fidelity), gain_cell(b.gain),
               b.physical_filter, true});
  }
  return t;
}

// --- threshold -----------------------------------------------------------------

struct ThresholdOptions {
  InputOptions input;
  GridOptions grid;
  std::string gains = "3,10,20,inf";
  OutputOptions output;
};

Table threshold_table(const ThresholdOptions& o) {
  const auto model = o.input.model();
  const auto gains = parse_gains(o.gains);
  const auto constraints = o.grid.constraints();
  std::vector<TradeoffPoint> grid;
  if (constraints.gain_constraint == GainConstraint::LowerBound) {
    grid = grid_sweep(*model, o.grid.chi_steps, o.grid.r_steps);
  }
  Table t({"gain_db", "f_min", "chi", "r", "reachable"});
  for (const auto& g : gains) {
    ThresholdPoint tp;
    if (constraints.gain_constraint == GainConstraint::Equality) {
      tp = threshold(*model, g);
    } else {
      tp.gain = g;
      for (const auto& p : grid) {
        if (!p.fidelity || !gain_satisfies(p.gain, g, constraints)) continue;
        if (!tp.f_min || *p.fidelity < *tp.f_min) {
          tp.f_min = p.fidelity;
          tp.chi = p.chi;
          tp.r = p.r;
        }
      }
    }
    if (tp.f_min) {
      t.add_row({gain_db_cell(g), *tp.f_min, angle_cell(tp.chi), tp.r, true});
    } else {
      t.add_row({gain_db_cell(g), NotAvailable{}, NotAvailable{}, NotAvailable{}, false});
    }
  }
  return t;
}

// --- curve -----------------------------------------------------------------------

struct CurveOptions {
  InputOptions input;
  GridOptions grid;
  std::string gain = "inf";
  int f_points = 200;
  std::string f_grid;
  OutputOptions output;
};

Table curve_table(const CurveOptions& o) {
  const Gain g = parse_gain(o.gain);
  Table t({"f_target", "fidelity", "p_succ", "chi", "r", "gain_db", "reachable"});
  auto add = [&t](const CurvePoint& c) {
    if (!c.reachable) {
      t.add_row({c.f_target, NotAvailable{}, NotAvailable{}, angle_cell(c.chi), NotAvailable{}, gain_db_cell(c.gain),
                 false});
      return;
    }
    t.add_row({c.f_target, optional_cell(c.f), c.p, angle_cell(c.chi), c.r, gain_db_cell(c.gain), true});
  };

  if (!o.input.kappa && g.is_infinite() && o.f_grid.empty()) {
    // fixed state at infinite gain: the r = 0 line itself
    for (const auto& c : infinite_gain_curve(o.input.theta.value_or(0.0) * kPi, o.input.beta2, o.grid.chi_steps)) {
      if (o.input.no_ff) throw UsageError("the infinite-gain curve is defined with feed-forward");
      add(c);
    }
    return t;
  }

  CurveSpec spec;
  spec.input = o.input.knowledge();
  spec.g_target = g;
  spec.beta_sq = o.input.beta2;
  spec.feedforward = o.input.ff();
  spec.f_points = o.f_points;
  if (!o.f_grid.empty()) spec.f_grid = parse_numbers(o.f_grid, "fidelity");
  spec.constraints = o.grid.constraints();
  spec.chi_steps = o.grid.chi_steps;
  spec.r_steps = o.grid.r_steps;
  spec.quad.nodes = o.input.quad_nodes;
  for (const auto& c : averaged_tradeoff_curve(spec)) add(c);
  return t;
}

// --- merit -----------------------------------------------------------------------

struct MeritOptions {
  InputOptions input;
  GridOptions grid;
  std::string kappas = "0,1,3,10,1000";
  std::string gains = "3,10,20,inf";
  OutputOptions output;
};

Table merit_table(const MeritOptions& o) {
  const auto gains = parse_gains(o.gains);
  std::vector<InputKnowledge> inputs;
  if (o.input.theta) {
    inputs.push_back(FixedTheta{*o.input.theta * kPi});
  } else {
    for (double k : parse_numbers(o.kappas, "kappa")) inputs.push_back(vmf::KnowledgePrior{k});
  }
  Table t({"kappa", "theta", "gain_db", "merit", "f_best", "p_best", "chi_best", "r_best", "p_unit", "chi_unit",
           "r_unit", "reachable"});
  for (const auto& input : inputs) {
    const auto* prior = std::get_if<vmf::KnowledgePrior>(&input);
    const Cell kappa = prior ? Cell(prior->kappa) : Cell(NotAvailable{});
    const Cell theta = prior ? Cell(NotAvailable{}) : angle_cell(std::get<FixedTheta>(input).theta);
    for (const auto& g : gains) {
      CurveSpec spec;
      spec.input = input;
      spec.g_target = g;
      spec.beta_sq = o.input.beta2;
      spec.feedforward = o.input.ff();
      spec.constraints = o.grid.constraints();
      spec.chi_steps = o.grid.chi_steps;
      spec.r_steps = o.grid.r_steps;
      spec.quad.nodes = o.input.quad_nodes;
      try {
        const auto m = merit(spec);
        t.add_row({kappa, theta, gain_db_cell(g), m.merit, optional_cell(m.best.f), m.best.p, angle_cell(m.best.chi),
                   m.best.r, m.unit.p, angle_cell(m.unit.chi), m.unit.r, true});
      } catch (const UnreachableUnitFidelity&) {
        std::vector<Cell> row{kappa, theta, gain_db_cell(g)};
        row.resize(t.columns().size() - 1, NotAvailable{});
        row.push_back(false);
        t.add_row(row);
      }
    }
  }
  return t;
}

// --- table-vmf ---------------------------------------------------------------------

struct TableVmfOptions {
  std::string kappas = "0,1,3,10";
  OutputOptions output;
};

Table table_vmf(const TableVmfOptions& o) {
  Table t({"kappa", "median", "first_decile", "mean_cos"});
  for (double k : parse_numbers(o.kappas, "kappa")) {
    const vmf::KnowledgePrior prior{k};
    t.add_row({k, pi_units(vmf::quantile(0.5, prior)), pi_units(vmf::quantile(0.1, prior)), vmf::mean_cos(prior)});
  }
  return t;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Performance lab for a heralded linear-optical qubit amplifier.\n"
               "Angles are given and printed in units of pi; gains in dB or 'inf'."};
  app.name("qamp");
  app.require_subcommand(1);

  MetricsOptions metrics;
  auto* m = app.add_subcommand("metrics", "Success probability, gains and fidelity at one setting");
  m->add_option("--chi", metrics.chi, "Ancilla angle chi, in units of pi (0..0.25)");
  m->add_option("--r", metrics.r, "PPBS amplitude reflectivity (0..1)");
  m->add_option("--theta", metrics.theta, "Input polar angle, in units of pi");
  m->add_option("--phi", metrics.phi, "Input azimuth, in units of pi");
  m->add_option("--beta2", metrics.beta2, "Qubit population |beta|^2");
  m->add_flag("--ff", metrics.ff, "Only the feed-forward row");
  m->add_flag("--no-ff", metrics.no_ff, "Only the row without feed-forward");
  metrics.output.attach(m);

  VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "Check the closed forms against the Fock-space simulation");
  v->add_option("--n", verify.n, "Number of random draws");
  v->add_option("--seed", verify.seed, "Random seed");
  v->add_option("--chi", verify.chi, "Check one setting instead (units of pi)");
  v->add_option("--r", verify.r, "Check one setting instead");
  v->add_option("--theta", verify.theta, "Check one setting instead (units of pi)");
  v->add_option("--phi", verify.phi, "Azimuth for a single setting (units of pi)");
  v->add_option("--beta2", verify.beta2, "|beta|^2 for a single setting");

  SweepOptions sweep;
  auto* s = app.add_subcommand("sweep", "Evaluate a (chi, r) grid, or the max-P surface with --surface");
  sweep.input.attach(s, true);
  sweep.grid.attach(s, true);
  s->add_flag("--surface", sweep.surface, "Maximize P at (fidelity, gain) targets");
  s->add_option("--gains", sweep.gains, "Gain targets for --surface (dB or inf)");
  s->add_option("--f-points", sweep.f_points, "Fidelity targets for --surface");
  s->add_option("--f-min", sweep.f_min, "Lowest fidelity target for --surface");
  s->add_flag("!--no-refine", sweep.refine, "Skip the Nelder-Mead refinement");
  sweep.output.attach(s);

  ThresholdOptions thr;
  auto* th = app.add_subcommand("threshold", "Lowest reachable fidelity at each gain");
  thr.input.attach(th, true);
  thr.grid.attach(th, true);
  th->add_option("--gains", thr.gains, "Gains (dB or inf)");
  thr.output.attach(th);

  CurveOptions curve;
  auto* c = app.add_subcommand("curve", "Maximum P versus fidelity at one gain");
  curve.input.attach(c, true);
  curve.grid.attach(c, true);
  c->add_option("--gain", curve.gain, "Gain (dB or inf)");
  c->add_option("--f-points", curve.f_points, "Number of fidelity targets from the threshold to 1");
  c->add_option("--f-grid", curve.f_grid, "Explicit comma-separated fidelity targets");
  curve.output.attach(c);

  MeritOptions merit_opts;
  auto* me = app.add_subcommand("merit", "Merit function max(P F) / P(F = 1)");
  merit_opts.input.attach(me, false);
  merit_opts.grid.attach(me, true);
  me->add_option("--kappas", merit_opts.kappas, "Prior concentrations");
  me->add_option("--gains", merit_opts.gains, "Gains (dB or inf)");
  merit_opts.output.attach(me);

  TableVmfOptions tv;
  auto* t = app.add_subcommand("table-vmf", "Medians and first deciles of the vMF prior");
  t->add_option("--kappas", tv.kappas, "Prior concentrations");
  tv.output.attach(t);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (m->parsed()) emit(metrics_table(metrics), metrics.output, out);
    if (v->parsed()) return run_verify(verify, out);
    if (s->parsed()) emit(sweep_table(sweep), sweep.output, out);
    if (th->parsed()) emit(threshold_table(thr), thr.output, out);
    if (c->parsed()) emit(curve_table(curve), curve.output, out);
    if (me->parsed()) emit(merit_table(merit_opts), merit_opts.output, out);
    if (t->parsed()) emit(table_vmf(tv), tv.output, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const qamp::Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace qamp::cli
