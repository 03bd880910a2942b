// ahem: command-line runner for the static Einstein–Maxwell solver.
//
//   ahem <subcommand> [flags]   subcommands: background-check, linear-probe,
//                               maxwell, solve, verify, asymptotics
//
// Every run writes report.json and config.ini (re-loadable with --config)
// under <out>/<subcommand>-<UTC timestamp>/. Exit codes: 0 all hard checks
// pass, 1 a hard check failed, 2 bad configuration or input, 3 numerical
// failure (the report is still written).

#include <zlib.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <functional>
#include <random>
#include <regex>
#include <sstream>

#include "ahem/asymptotics.hpp"
#include "ahem/einstein.hpp"
#include "ahem/linops.hpp"
#include "ahem/maxwell.hpp"
#include "ahem/serialize.hpp"
#include "ahem/stress.hpp"

#ifndef AHEM_VERSION
#define AHEM_VERSION "unknown"
#endif

using namespace ahem;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string out = "runs";
  int n = 4;
  int n_rho = 48, n_theta = 24;
  bool radial = false;
  std::vector<std::string> modes{"l=1"};
  double eps = 0.01;
  double tol = 1e-10;
  int max_iter = 30;
  std::string jacobian = "frozen";
  int continuation = 4;
  std::string input;
  std::string boundary_csv;
  int lmax = 8;
  unsigned seed = 1;
};

// l=<degree>[:<amplitude>]
Mode parse_mode(const std::string& s) {
  std::smatch m;
  static const std::regex re(R"(l=(\d+)(?::([-+0-9.eE]+))?)");
  if (!std::regex_match(s, m, re)) throw ConfigError("bad mode '" + s + "', expected l=<degree>[:<amplitude>]");
  Mode mode{std::stoi(m[1]), 1.0};
  if (m[2].matched) {
    std::size_t used = 0;
    mode.amplitude = std::stod(m[2], &used);
    if (static_cast<long>(used) != m[2].length()) throw ConfigError("bad amplitude in mode '" + s + "'");
  }
  return mode;
}

std::vector<Mode> read_boundary_csv(const std::string& path, int n, int lmax) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read boundary CSV " + path);
  std::vector<double> th, v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a >> b)) throw ConfigError("bad row in " + path + ": " + line);
    th.push_back(a);
    v.push_back(b);
  }
  if (static_cast<int>(th.size()) <= lmax) throw ConfigError("boundary CSV needs more than lmax rows");
  return fit_zonal_modes(n, th, v, lmax);
}

SolverConfig solver_config(const Options& o) {
  SolverConfig c;
  c.n = o.n;
  c.symmetry = o.radial ? Symmetry::radial : Symmetry::axisymmetric;
  c.n_rho = o.n_rho;
  c.n_theta = o.radial ? 0 : o.n_theta;
  c.modes.clear();
  if (!o.boundary_csv.empty()) {
    c.modes = read_boundary_csv(o.boundary_csv, o.n, o.lmax);
  } else {
    for (const std::string& s : o.modes) c.modes.push_back(parse_mode(s));
  }
  c.epsilon = o.eps;
  c.tol = o.tol;
  c.max_iterations = o.max_iter;
  c.jacobian = o.jacobian == "refreshed" ? JacobianMode::refreshed : JacobianMode::frozen;
  c.continuation_steps = o.continuation;
  return c;
}

json modes_json(const std::vector<Mode>& modes) {
  json a = json::array();
  for (const Mode& m : modes) a.push_back({{"l", m.l}, {"amplitude", m.amplitude}});
  return a;
}

json config_json(const SolverConfig& c) {
  return {{"n", c.n},
          {"symmetry", c.symmetry == Symmetry::radial ? "radial" : "axisymmetric"},
          {"n_rho", c.n_rho},
          {"n_theta", c.n_theta},
          {"modes", modes_json(c.modes)},
          {"epsilon", c.epsilon},
          {"tol", c.tol},
          {"max_iterations", c.max_iterations},
          {"jacobian", c.jacobian == JacobianMode::refreshed ? "refreshed" : "frozen"},
          {"continuation_steps", c.continuation_steps}};
}

SolverConfig config_from_json(const json& j) {
  SolverConfig c;
  c.n = j.at("n");
  c.symmetry = j.at("symmetry") == "radial" ? Symmetry::radial : Symmetry::axisymmetric;
  c.n_rho = j.at("n_rho");
  c.n_theta = j.at("n_theta");
  c.modes.clear();
  for (const json& m : j.at("modes")) c.modes.push_back({m.at("l"), m.at("amplitude")});
  c.epsilon = j.at("epsilon");
  c.tol = j.at("tol");
  c.max_iterations = j.at("max_iterations");
  c.jacobian = j.at("jacobian") == "refreshed" ? JacobianMode::refreshed : JacobianMode::frozen;
  c.continuation_steps = j.at("continuation_steps");
  return c;
}

json history_json(const std::vector<IterationRecord>& h) {
  json a = json::array();
  for (const IterationRecord& r : h)
    a.push_back({{"epsilon", r.epsilon},
                 {"iteration", r.iteration},
                 {"residual", r.residual},
                 {"raw", r.raw},
                 {"step", r.step},
                 {"damping", r.damping}});
  return a;
}

json fit_json(const DecayFit& f) {
  return {{"name", f.name},
          {"model", f.model == DecayModel::pure_power ? "pure_power" : "power_plus_log"},
          {"window", {f.rho_lo, f.rho_hi}},
          {"theta", f.theta},
          {"exponent", f.vanishes() ? json("vanishes") : json(f.exponent)},
          {"coefficient", f.coefficient},
          {"log_coefficient", f.log_coefficient},
          {"residual", f.residual},
          {"half_width", f.half_width}};
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Hard checks decide the exit code; soft ones are reported only.
class Report {
 public:
  json body = json::object();

  void check(const std::string& name, double value, double limit, bool pass, bool hard = true) {
    checks_.push_back({{"name", name}, {"value", value}, {"limit", limit}, {"pass", pass}, {"hard", hard}});
    if (hard && !pass) failed_ = true;
    std::cerr << (pass ? "  ok    " : (hard ? "  FAIL  " : "  note  ")) << name << ": " << value << " (limit "
              << limit << ")\n";
  }
  void below(const std::string& name, double value, double limit, bool hard = true) {
    check(name, value, limit, value < limit, hard);
  }
  void above(const std::string& name, double value, double limit, bool hard = true) {
    check(name, value, limit, value > limit, hard);
  }
  bool failed() const { return failed_; }
  json checks() const { return checks_; }

 private:
  json checks_ = json::array();
  bool failed_ = false;
};

std::string utc_stamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path make_run_dir(const std::string& out, const std::string& sub) {
  const fs::path base = fs::path(out) / (sub + "-" + utc_stamp());
  fs::path dir = base;
  for (int k = 1; fs::exists(dir); ++k) dir = base.string() + "-" + std::to_string(k);
  fs::create_directories(dir);
  return dir;
}

std::string hex32(unsigned long v) {
  std::ostringstream s;
  s << std::hex << std::setw(8) << std::setfill('0') << v;
  return s.str();
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path);
  for (std::size_t k = 0; k < header.size(); ++k) f << (k ? "," : "") << header[k];
  f << '\n' << std::setprecision(17);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) f << (k ? "," : "") << r[k];
    f << '\n';
  }
}

GridPtr make_grid(const Options& o) {
  return Grid::build(Chart{o.n, o.radial ? Symmetry::radial : Symmetry::axisymmetric}, o.n_rho,
                     o.radial ? 0 : o.n_theta);
}

double sup_interior(const Field& f, const std::function<double(int, int, double)>& g) {
  double m = 0;
  for (int c = 0; c < f.num_components(); ++c)
    for (int q = 0; q < f.grid->size(); ++q)
      if (!f.grid->is_boundary(q)) m = std::max(m, g(c, q, f.comps[c](q)));
  return m;
}

// Smooth probe data, regular at the centre and on the axis: functions of
// C = ρ/(1 + ρ²/4) and Z = (1 − ρ²/4)cos θ/(1 + ρ²/4), both O(ρ²)·smooth.
struct ProbeData {
  std::mt19937 rng;
  std::uniform_real_distribution<double> u{-1.0, 1.0};

  static double C(double r) { return r / (1.0 + 0.25 * r * r); }
  static double Z(const Grid& g, int q) {
    if (!g.axisymmetric()) return 0.0;
    const double r = g.rho_at(q);
    return (1.0 - 0.25 * r * r) * std::cos(g.theta_at(q)) / (1.0 + 0.25 * r * r);
  }

  Field scalar(const GridPtr& g) {
    const double a = u(rng), b = u(rng), c = u(rng);
    Field f = Field::zeros(g, TensorKind::scalar, "W", 2.0);
    for (int q = 0; q < g->size(); ++q) {
      const double cc = C(g->rho_at(q)), z = Z(*g, q);
      f.comps[0](q) = cc * cc * (a + b * z + c * z * z);
    }
    return f;
  }

  Field sym2(const GridPtr& g) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng), e = u(rng);
    Field h = Field::zeros(g, TensorKind::sym2, "h", 2.0);
    for (int q = 0; q < g->size(); ++q) {
      const double cc = C(g->rho_at(q)), z = Z(*g, q), s = std::sin(g->theta_at(q));
      const double conf = cc * cc * (a + b * z), bend = cc * cc * (1.0 - cc * cc);
      h.comps[0](q) = conf + c * bend;
      if (g->axisymmetric()) {
        h.comps[1](q) = d * bend * s;
        h.comps[2](q) = conf + e * bend * s * s;
        h.comps[3](q) = conf;
      } else {
        h.comps[1](q) = conf;
      }
    }
    return h;
  }

  StaticTriple background(const GridPtr& g, double scale) {
    StaticTriple t = StaticTriple::background(g);
    t.wbar = scalar(g);
    t.hbar = sym2(g);
    t.wbar.comps[0] *= scale;
    for (auto& c : t.hbar.comps) c *= scale;
    t.wbar.weight = t.hbar.weight = 0.0;
    t.wbar.name = "wbar";
    t.hbar.name = "hbar";
    return t;
  }
};

double bump(double x) { return x <= 0.0 || x >= 1.0 ? 0.0 : std::pow(4.0 * x * (1.0 - x), 8); }

StaticTriple triple_from(const StateBundle& b) {
  StaticTriple t = StaticTriple::background(b.grid);
  for (const Field& f : b.fields) {
    if (f.name == "wbar") t.wbar = f;
    else if (f.name == "hbar") t.hbar = f;
    else if (f.name == "U") t.U = f;
  }
  return t;
}

std::vector<Field> triple_fields(const StaticTriple& t) {
  Field w = t.wbar, h = t.hbar, u = t.U;
  w.name = "wbar";
  h.name = "hbar";
  u.name = "U";
  return {w, h, u};
}

// ---------------------------------------------------------------------------

void background_check(const Options& o, Report& rep, const fs::path& dir) {
  const GridPtr g = make_grid(o);
  const auto [t, bd] = ads_background(o.n, g);
  const ResidualTriple r = static_residual(t);
  rep.body["static_residual"] = {{"V", r.sup_V}, {"g", r.sup_g}, {"U", r.sup_U}};
  rep.below("static residual sup", r.sup(), 1e-10);

  const double target = -o.n * (o.n + 1.0);
  const WarpedCurvature w = warped_curvature(t, -1);
  const double dev = sup_interior(w.scalar, [&](int, int, double v) { return std::abs(v - target); });
  rep.body["warped_scalar_target"] = target;
  rep.below("warped scalar curvature deviation", dev, 1e-9);
  const WarpedCurvature d = warped_curvature_direct(t, -1);
  const double ddev = sup_interior(d.scalar, [&](int, int q, double v) {
    return std::abs(v - target) / chart_conditioning(*g, q);
  });
  rep.below("direct-path scalar curvature deviation (conditioned)", ddev, 1e-8, false);
  rep.body["gauge_vector_sup"] = gauge_vector(t).sup;
  write_state_file(dir / "background.ahf", g, triple_fields(t), {{"kind", "background"}, {"n", o.n}});
}

void linear_probe(const Options& o, Report& rep, const fs::path&) {
  const GridPtr g = make_grid(o);
  const auto [bg, bd] = ads_background(o.n, g);
  ProbeData pd{std::mt19937(o.seed)};

  // directional difference quotients of the modified map at the background
  json fd = json::array();
  double worst = 0, worst_ratio_dev = 0;
  for (int k = 0; k < 5; ++k) {
    const Field W = pd.scalar(g), h = pd.sym2(g);
    const LinearPair lp = apply_lL(W, h, bg);
    auto err = [&](double step) {
      StaticTriple t = bg;
      t.wbar.comps[0] = step * W.comps[0];
      for (int c = 0; c < h.num_components(); ++c) t.hbar.comps[c] = step * h.comps[c];
      const ResidualTriple r = modified_residual(t);
      double e = 0;
      for (int q = 0; q < g->size(); ++q) {
        if (g->is_boundary(q)) continue;
        const double k2 = chart_conditioning(*g, q);
        e = std::max(e, std::abs(r.R_V.comps[0](q) / step - lp.l.comps[0](q)) / k2);
        for (int c = 0; c < h.num_components(); ++c)
          e = std::max(e, std::abs(r.R_g.comps[c](q) / step - lp.L.comps[c](q)) / k2);
      }
      return e;
    };
    const double e1 = err(1e-4), e2 = err(5e-5);
    fd.push_back({{"error", e1}, {"error_half_step", e2}, {"ratio", e1 / e2}});
    worst = std::max(worst, e1);
    worst_ratio_dev = std::max(worst_ratio_dev, std::abs(e1 / e2 - 2.0));
  }
  rep.body["difference_quotients"] = fd;
  rep.below("difference quotient error / step", worst / 1e-4, 10.0);
  rep.below("first-order ratio deviation |e(h)/e(h/2) - 2|", worst_ratio_dev, 0.2);

  double rw = 0;
  for (int k = 0; k < 20; ++k) {
    const StaticTriple at = k == 0 ? bg : pd.background(g, 0.3);
    const Field W = pd.scalar(g), h = pd.sym2(g);
    const RewriteDefect d = rewrite_defect(W, h, at);
    const RewrittenPair rp = apply_pP(W, h, at);
    rw = std::max({rw, d.p_conditioned / (1.0 + rp.p.sup_norm(true)), d.P_conditioned / (1.0 + rp.P.sup_norm(true))});
  }
  rep.below("rewriting identities (conditioned, relative)", rw, 1e-10);

  double cj = 0;
  for (double s : {-3.0, -1.0, 3.0})
    for (int k = 0; k < 3; ++k) cj = std::max(cj, conjugation_defect(pd.scalar(g), s, pd.background(g, 0.3)));
  rep.below("conjugation defect", cj, 1e-10);

  const Chart chart = g->chart();
  const auto ladder = o.radial ? std::vector<std::pair<int, int>>{{16, 0}, {32, 0}, {64, 0}}
                               : std::vector<std::pair<int, int>>{{8, 4}, {16, 8}};
  const NondegeneracyReport nd = nondegeneracy_probe(chart, ladder);
  json nl = json::array();
  for (const OperatorProbe& p : nd.ladder)
    nl.push_back({{"n_rho", p.n_rho}, {"n_theta", p.n_theta}, {"sigma_min", p.smallest}, {"sigma_max", p.largest}});
  rep.body["nondegeneracy"] = nl;
  rep.check("nondegeneracy ladder", nd.ladder.back().smallest, nd.floor, nd.nondegenerate);

  json wt = json::array();
  for (int s : {-3, -1, 3}) {
    const WeightSpec w = weight_spec(o.n, Rational(s));
    auto str = [](const Rational& r) {
      std::ostringstream x;
      x << r;
      return x.str();
    };
    wt.push_back({{"s", s},
                  {"interval", {str(w.lower), str(w.upper)}},
                  {"roots", {str(w.root_minus), str(w.root_plus)}},
                  {"kernel_constants", w.kernel_constants},
                  {"excluded", w.excluded}});
  }
  rep.body["weights"] = wt;
  const Rational delta = o.n == 3 ? Rational(1, 2) : Rational(1);
  rep.check("working weight admissible for s = -1", boost::rational_cast<double>(delta), 0.0,
            weight_spec(o.n, Rational(-1)).admissible(delta));

  double pmin = std::numeric_limits<double>::infinity();
  std::uniform_real_distribution<double> ua(0.02, 0.3), ub(0.6, 1.6);
  json pc = json::array();
  for (int k = 0; k < 10; ++k) {
    const double a = ua(pd.rng), b = ub(pd.rng), c = pd.u(pd.rng);
    Field f = Field::zeros(g, TensorKind::scalar, "u");
    for (int q = 0; q < g->size(); ++q) {
      const double r = g->rho_at(q);
      if (r > 0) f.comps[0](q) = bump(std::log(r / a) / std::log(b / a)) * (1.0 + 0.5 * c * std::cos(g->theta_at(q)));
    }
    const PoincareResult p = poincare_check(f, bg);
    pc.push_back({{"support", {a, b}}, {"ratio", p.ratio}, {"bound", p.bound}});
    pmin = std::min(pmin, p.ratio / p.bound);
  }
  rep.body["poincare"] = pc;
  rep.above("smallest Rayleigh ratio / ((n-1)/2)^2", pmin, 1.0);
}

Field projected_modes(const Field& f, int n, int l) {
  const Grid& g = *f.grid;
  Field out = Field::zeros(f.grid, TensorKind::scalar);
  const Eigen::VectorXd& w = g.boundary_weights();
  double norm = 0;
  for (int j = 0; j < g.n_ang(); ++j) norm += w(j) * std::pow(zonal_harmonic(n, l, g.theta()(j)), 2);
  for (int i = 0; i < g.n_rho(); ++i) {
    double s = 0;
    for (int j = 0; j < g.n_ang(); ++j) s += w(j) * zonal_harmonic(n, l, g.theta()(j)) * f.comps[0](g.node(i, j));
    for (int j = 0; j < g.n_ang(); ++j) out.comps[0](g.node(i, j)) = s / norm;
  }
  return out;
}

void maxwell(const Options& o, Report& rep, const fs::path& dir) {
  const SolverConfig cfg = solver_config(o);
  cfg.validate();
  StaticTriple t;
  if (!o.input.empty()) {
    t = triple_from(read_state_file(o.input));
    if (t.grid->n() != o.n) throw ConfigError("input state has n = " + std::to_string(t.grid->n()));
  } else {
    t = ads_background(o.n, make_grid(o)).first;
  }
  const GridPtr g = t.grid;
  const BoundaryData bd = cfg.boundary();
  rep.body["boundary_modes"] = modes_json(bd.U_hat);
  const MaxwellSolution s = solve_maxwell(bd, t, o.tol);
  rep.body["residual"] = s.residual;
  rep.body["rcond"] = s.rcond;
  rep.below("Maxwell residual (conditioned)", s.residual_conditioned, o.tol);

  double lo = 1e300, hi = -1e300;
  for (int k = 0; k <= 4000; ++k) {
    const double u = bd.U_hat_at(M_PI * k / 4000.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  const double span = std::max(hi - lo, 1e-300);
  const double over = std::max(s.U.comps[0].maxCoeff() - hi, lo - s.U.comps[0].minCoeff());
  rep.below("maximum principle overshoot / boundary range", std::max(over, 0.0) / span, 1e-8);

  Field du = s.U;
  du.comps[0] -= bd.U_hat_nodal(*g);
  du.name = "U - U_hat";
  json fits = json::array();
  try {
    const DecayFit pp = fit_decay(du, DecayModel::pure_power);
    fits.push_back(fit_json(pp));
    if (o.n == 4) {
      const DecayFit pl = fit_decay(du, DecayModel::power_plus_log);
      fits.push_back(fit_json(pl));
      if (!pp.vanishes())
        rep.above("pure-power / power-plus-log residual ratio", pp.residual / std::max(pl.residual, 1e-300), 5.0,
                  false);
    } else if (o.n == 3 && !pp.vanishes()) {
      rep.below("decay exponent deviation from 1", std::abs(pp.exponent - 1.0), 0.05, false);
    }
  } catch (const ConfigError& e) {
    rep.body["notes"].push_back(std::string("no decay fit: ") + e.what());
  }
  rep.body["decay"] = fits;

  if (o.n == 4 && g->axisymmetric()) {
    const LogCoefficient pr = predicted_log_coefficient(bd, *g);
    const LogIdentity id = logterm_identity_check(bd, pr, *g);
    rep.body["log_identity"] = {{"lhs", id.lhs}, {"rhs", id.rhs}};
    rep.below("log-term identity (relative)", id.residual, 1e-6);
    const LogCoefficient ex = extract_log_coefficient(s.U, bd);
    const double err = (ex.value - pr.value).cwiseAbs().maxCoeff();
    rep.body["U_ln"] = {{"theta", vec_json(ex.theta)}, {"extracted", vec_json(ex.value)}, {"predicted", vec_json(pr.value)}};
    if (pr.sup() > 0) rep.below("U_ln relative error", err / pr.sup(), 0.02, false);
    else rep.below("U_ln sup (constant data)", ex.sup(), 1e-8, false);
  }

  std::vector<std::string> header{"rho"};
  std::vector<Field> profiles;
  for (const Mode& m : bd.U_hat) {
    if (!g->axisymmetric() && m.l > 0) continue;
    header.push_back("U_l" + std::to_string(m.l));
    header.push_back("U_minus_U_hat_l" + std::to_string(m.l));
    profiles.push_back(g->axisymmetric() ? projected_modes(s.U, o.n, m.l) : s.U);
    profiles.push_back(g->axisymmetric() ? projected_modes(du, o.n, m.l) : du);
  }
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < g->n_rho(); ++i) {
    std::vector<double> r{g->rho()(i)};
    for (const Field& p : profiles) r.push_back(p.comps[0](g->node(i, 0)));
    rows.push_back(r);
  }
  write_csv(dir / "maxwell_modes.csv", header, rows);
  StaticTriple out = t;
  out.U = s.U;
  write_state_file(dir / "maxwell.ahf", g, triple_fields(out),
                   {{"kind", "maxwell"}, {"n", o.n}, {"boundary_modes", modes_json(bd.U_hat)}});
}

void write_profiles(const Solution& s, const fs::path& path) {
  const Grid& g = *s.triple.grid;
  const StressBlock sb = maxwell_stress(s.triple);
  const Eigen::VectorXd uh = s.bd.U_hat_nodal(g);
  std::vector<std::string> header{"rho", "theta", "wbar"};
  for (const std::string& c : component_names(TensorKind::sym2, g.chart())) header.push_back("h_" + c);
  header.push_back("U_minus_U_hat");
  header.push_back("T_NN");
  std::vector<std::vector<double>> rows;
  for (int q = 0; q < g.size(); ++q) {
    std::vector<double> r{g.rho_at(q), g.theta_at(q), s.triple.wbar.comps[0](q)};
    for (const auto& c : s.triple.hbar.comps) r.push_back(c(q));
    r.push_back(s.triple.U.comps[0](q) - uh(q));
    r.push_back(sb.TNN.comps[0](q));
    rows.push_back(r);
  }
  write_csv(path, header, rows);
}

json residuals_json(const Solution& s) {
  return {{"modified", {{"V", s.modified.sup_V}, {"g", s.modified.sup_g}, {"conditioned", std::max(s.modified.cond_V, s.modified.cond_g)}}},
          {"static", {{"V", s.stat.sup_V}, {"g", s.stat.sup_g}, {"U", s.stat.sup_U},
                      {"conditioned", std::max({s.stat.cond_V, s.stat.cond_g, s.stat.cond_U})}}},
          {"gauge", {{"sup", s.gauge.sup}, {"weighted", s.gauge.weighted}, {"conditioned", s.gauge.conditioned}}},
          {"maxwell", s.maxwell_residual}};
}

void solve(const Options& o, Report& rep, const fs::path& dir) {
  const SolverConfig cfg = solver_config(o);
  rep.body["solver"] = config_json(cfg);
  Solution s;
  try {
    s = newton_solve(cfg);
  } catch (const SolverError& e) {
    rep.body["history"] = history_json(e.history);
    throw;
  }
  rep.body["history"] = history_json(s.history);
  rep.body["ladder"] = s.ladder;
  rep.body["residuals"] = residuals_json(s);
  rep.body["metric_perturbation_sup"] = metric_perturbation_sup(s.triple);
  rep.check("converged modified residual (conditioned)", s.history.back().residual, cfg.tol,
            s.history.back().residual <= cfg.tol);
  write_state_file(dir / "solution.ahf", s.triple.grid, triple_fields(s.triple),
                   {{"kind", "solution"}, {"solver", config_json(cfg)}, {"history", history_json(s.history)}});
  write_profiles(s, dir / "profiles.csv");
}

Solution load_solution(const std::string& path) {
  if (path.empty()) throw ConfigError("--input is required");
  const StateBundle b = read_state_file(path);
  if (!b.metadata.contains("solver")) throw ConfigError(path + " carries no solver configuration");
  SolverConfig cfg;
  try {
    cfg = config_from_json(b.metadata.at("solver"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad solver metadata: ") + e.what());
  }
  return make_solution(cfg, triple_from(b));
}

void verify(const Options& o, Report& rep, const fs::path&) {
  const Solution s = load_solution(o.input);
  rep.body["solver"] = config_json(s.config);
  const ResidualReport r = verify_solution(s);
  rep.body["residuals"] = residuals_json(s);
  rep.body["B_omega"] = {{"sup", r.B_omega_sup}, {"conditioned", r.B_omega_cond}};
  rep.body["beta"] = {{"sup", r.beta_sup}, {"conditioned", r.beta_cond}, {"paths", r.beta_paths}};
  rep.body["T_NN_sup"] = r.TNN_sup;
  rep.body["vacuum"] = r.vacuum;
  rep.below("modified residual (conditioned)", r.modified_cond, 1e-8);
  rep.below("gauge vector (conditioned)", r.omega_cond, 1e-8);
  rep.below("B(Omega) (conditioned)", r.B_omega_cond, 1e-7);
  rep.below("static residual (conditioned)", r.static_cond, 1e-7);
  rep.below("beta evaluation paths", r.beta_paths, 1e-10);
  json fits = json::array();
  for (const DecayFit& f : r.fits) {
    fits.push_back(fit_json(f));
    if (f.vanishes()) continue;
    // O(ρ) and O(ρ²) are upper bounds on the perturbation, so only the slow side is hard
    if (f.name == "V - V0" && f.model == DecayModel::pure_power)
      rep.above("V - V0 decay exponent", f.exponent, 0.95);
    if (f.name == "h") rep.above("h decay exponent", f.exponent, 1.9);
    if (f.name == "T_NN") rep.below("T_NN exponent deviation from 4", std::abs(f.exponent - 4.0), 0.2, false);
  }
  rep.body["decay"] = fits;
  if (r.uln_extracted) {
    rep.body["U_ln"] = {{"theta", vec_json(r.uln_extracted->theta)},
                        {"extracted", vec_json(r.uln_extracted->value)},
                        {"predicted", vec_json(r.uln_predicted->value)}};
    if (r.uln_predicted->sup() > 0) rep.below("U_ln relative error", r.uln_error, 0.02, false);
  }
  rep.body["notes"] = r.notes;
}

void asymptotics(const Options& o, Report& rep, const fs::path&) {
  StaticTriple t;
  BoundaryData bd;
  if (!o.input.empty()) {
    const Solution s = load_solution(o.input);
    t = s.triple;
    bd = s.bd;
  } else {
    const GridPtr g = make_grid(o);
    std::tie(t, bd) = ads_background(o.n, g);
  }
  const FGData fg = fg_check(t);
  json hb = json::array();
  for (const auto& c : fg.h_breve) hb.push_back(vec_json(c));
  rep.body["boundary"] = {{"theta", vec_json(fg.theta)},
                          {"V_breve", vec_json(fg.V_breve)},
                          {"h_breve", hb},
                          {"rho2_coefficient", vec_json(fg.rho2_coefficient)},
                          {"odd_residual", fg.odd_residual}};
  rep.below("rho^1 coefficients", fg.odd_residual, 1e-6, false);

  const Grid& g = *t.grid;
  Field dv = t.wbar;
  dv.name = "V - V0";
  for (int q = 0; q < g.size(); ++q) {
    const double r = g.rho_at(q);
    dv.comps[0](q) = g.is_boundary(q) ? 0.0 : dv.comps[0](q) * (1.0 + 0.25 * r * r) / r;
  }
  Field h = t.hbar;
  h.name = "h";
  Field du = t.U;
  du.comps[0] -= bd.U_hat_nodal(g);
  du.name = "U - U_hat";
  json fits = json::array();
  auto add_fit = [&](const Field& f, DecayModel m) {
    try {
      fits.push_back(fit_json(fit_decay(f, m)));
    } catch (const ConfigError& e) {
      rep.body["notes"].push_back("no decay fit for " + f.name + ": " + e.what());
    }
  };
  for (const Field* f : {&dv, &h, &du}) add_fit(*f, DecayModel::pure_power);
  if (g.n() == 4) add_fit(du, DecayModel::power_plus_log);
  rep.body["decay"] = fits;
  if (g.n() == 4 && g.axisymmetric() && !o.input.empty()) {
    const LogCoefficient ex = extract_log_coefficient(t.U, bd), pr = predicted_log_coefficient(bd, g);
    rep.body["U_ln"] = {{"theta", vec_json(ex.theta)}, {"extracted", vec_json(ex.value)}, {"predicted", vec_json(pr.value)}};
  }
}

int threads_from_env(json& info) {
  const char* env = std::getenv("AHEM_THREADS");
  int k = 1;
  if (env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError(std::string("AHEM_THREADS must be a positive integer, got '") + env + "'");
    k = static_cast<int>(v);
  }
  Eigen::setNbThreads(k);
  info = {{"requested", k}, {"eigen", Eigen::nbThreads()}};
  return k;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Static Einstein-Maxwell solver on asymptotically hyperbolic backgrounds"};
  app.set_config("--config", "", "Flat key = value configuration file");
  app.add_option("--out", o.out, "Directory for run directories")->capture_default_str();
  app.add_option("--n", o.n, "Spatial dimension")->capture_default_str();
  app.add_option("--Nr", o.n_rho, "Radial nodes")->capture_default_str();
  app.add_option("--Nt", o.n_theta, "Angular nodes")->capture_default_str();
  app.add_flag("--radial", o.radial, "Radial-only chart");
  app.add_option("--mode", o.modes, "Boundary mode l=<degree>[:<amplitude>], repeatable")->capture_default_str();
  app.add_option("--boundary-csv", o.boundary_csv, "Nodal boundary potential (theta, value rows)");
  app.add_option("--lmax", o.lmax, "Highest degree fitted to --boundary-csv")->capture_default_str();
  app.add_option("--eps", o.eps, "Amplitude multiplying the boundary modes")->capture_default_str();
  app.add_option("--tol", o.tol, "Conditioned residual tolerance")->capture_default_str();
  app.add_option("--max-iter", o.max_iter, "Newton iteration limit")->capture_default_str();
  app.add_option("--jacobian", o.jacobian, "frozen or refreshed")
      ->check(CLI::IsMember({"frozen", "refreshed"}))
      ->capture_default_str();
  app.add_option("--continuation", o.continuation, "Continuation stages after a failed direct solve")
      ->capture_default_str();
  app.add_option("--input", o.input, ".ahf state for maxwell, verify and asymptotics");
  app.add_option("--seed", o.seed, "Seed for probe data")->capture_default_str();
  app.fallthrough();
  app.require_subcommand(1, 1);

  using Command = void (*)(const Options&, Report&, const fs::path&);
  const std::vector<std::pair<std::string, Command>> commands{
      {"background-check", background_check}, {"linear-probe", linear_probe}, {"maxwell", maxwell},
      {"solve", solve},                       {"verify", verify},             {"asymptotics", asymptotics}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  Command run = nullptr;
  for (const auto& [name, fn] : commands)
    if (name == sub) run = fn;

  Report rep;
  fs::path dir;
  int code = 0;
  const std::string config_text = app.config_to_str(true, false);
  const std::string hashed = sub + "\n" + config_text;
  rep.body["subcommand"] = sub;
  rep.body["version"] = AHEM_VERSION;
  rep.body["config_hash"] = hex32(crc32(0L, reinterpret_cast<const Bytef*>(hashed.data()), hashed.size()));
  rep.body["config"] = config_text;
  try {
    json threads;
    threads_from_env(threads);
    rep.body["threads"] = threads;
    dir = make_run_dir(o.out, sub);
    std::ofstream(dir / "config.ini") << config_text;
    std::cerr << "ahem " << sub << " -> " << dir.string() << "\n";
    const auto t0 = std::chrono::steady_clock::now();
    run(o, rep, dir);
    std::cerr << "  done in " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
              << " s\n";
    code = rep.failed() ? 1 : 0;
    rep.body["status"] = rep.failed() ? "failed" : "ok";
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    rep.body["status"] = "config_error";
    rep.body["error"] = e.what();
    code = 2;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    rep.body["status"] = "config_error";
    rep.body["error"] = e.what();
    code = 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    rep.body["status"] = "numerical_failure";
    rep.body["error"] = e.what();
    code = 3;
  }
  rep.body["checks"] = rep.checks();
  if (!dir.empty()) std::ofstream(dir / "report.json") << rep.body.dump(2) << '\n';
  return code;
}
