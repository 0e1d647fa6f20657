// pinchlab: enumerate pinch candidate subsets of a loop-integral spec, solve
// them exactly, emit Landau polynomials and leading asymptotic data, and
// verify predicted singular exponents against direct numeric integration.
//
// Output is JSON on stdout; human diagnostics go to stderr; CSV scan data is
// written to --out.  Exit codes: 0 success, 2 input error, 3 symbolic-stage
// error, 4 numeric-stage error.
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "pinchlab/asympt.hpp"
#include "pinchlab/diagram.hpp"
#include "pinchlab/errors.hpp"
#include "pinchlab/landau.hpp"
#include "pinchlab/oracle.hpp"
#include "pinchlab/pinch.hpp"
#include "pinchlab/symbols.hpp"
#include "pinchlab/toml_lite.hpp"

using namespace pinchlab;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr double kPi = 3.14159265358979323846;

struct Options {
  std::string spec;
  std::string config;
  std::string out;
  std::string kinematics;
  std::string subset;
  std::string dimension; // "d" or an integer, asympt only
  std::uint64_t seed = 0;
  std::uint64_t samples = 2000000;
  int d = 3;
  double theta = -kPi / 2.0;
  std::size_t max_size = 0; // 0 = up to the full propagator list
  std::size_t branch = 0;
  double r_max = 50.0;
  double eps_min = 1e-4;
  double eps_max = 1e-2;
  int eps_points = 7;
};

int exit_code_for(const std::string& kind) {
  static const std::set<std::string> input{"SchemaError", "ShapeError",
                                           "SymbolError", "ExprError",
                                           "ValidationError"};
  static const std::set<std::string> symbolic{
      "DivisionError",    "MixedRadicand",     "InconsistentSystem",
      "UnsupportedPinch", "NotFinite",         "DegenerateGram",
      "NormalFormFailure", "ReductionError"};
  static const std::set<std::string> numeric{
      "PoleAtPoint",   "ContourAmbiguous",    "NotPositiveDefinite",
      "NonConvergent", "InsufficientSamples", "DegenerateSamples"};
  if (input.count(kind)) return 2;
  if (symbolic.count(kind)) return 3;
  if (numeric.count(kind)) return 4;
  return 1;
}

// A bare file name that does not exist locally is looked up in the fixture
// directory (PINCHLAB_FIXTURES, default "fixtures").
std::string resolve_spec_path(const std::string& p) {
  if (std::ifstream(p).good()) return p;
  if (p.find('/') == std::string::npos) {
    const char* root = std::getenv("PINCHLAB_FIXTURES");
    std::string alt = std::string(root ? root : "fixtures") + "/" + p;
    if (std::ifstream(alt).good()) return alt;
  }
  return p; // let the loader raise the error for the path as given
}

json load_doc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw schema_error("cannot open diagram file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0)
    return parse_toml_lite(text);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw schema_error("diagram file '" + path + "': " + e.what());
  }
}

std::vector<std::size_t> parse_subset(const std::string& s) {
  if (s.empty())
    throw validation_error("a propagator subset is required, e.g. --subset \"0,1\"");
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      long v = std::stol(tok, &pos);
      if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
      out.push_back(std::size_t(v));
    } catch (const std::exception&) {
      throw validation_error("bad subset entry '" + tok + "'");
    }
  }
  if (out.empty()) throw validation_error("empty subset");
  return out;
}

std::map<Sym, Complex> parse_kinematics(const std::string& s) {
  std::map<Sym, Complex> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw validation_error("kinematics entries look like name=value; got '" +
                             tok + "'");
    std::string name = tok.substr(0, eq);
    double v = 0.0;
    try {
      std::size_t pos = 0;
      v = std::stod(tok.substr(eq + 1), &pos);
      if (pos != tok.size() - eq - 1) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw validation_error("bad kinematics value in '" + tok + "'");
    }
    out[intern_symbol(name)] = Complex(v, 0.0);
  }
  return out;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> eps_grid(const Options& o) {
  if (!(o.eps_min > 0) || !(o.eps_max > o.eps_min) || o.eps_points < 5)
    throw validation_error(
        "eps grid needs 0 < eps-min < eps-max and at least 5 points");
  std::vector<double> g(o.eps_points);
  for (int i = 0; i < o.eps_points; ++i) {
    double t = double(i) / double(o.eps_points - 1);
    g[i] = std::exp(std::log(o.eps_max) +
                    t * (std::log(o.eps_min) - std::log(o.eps_max)));
  }
  return g;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot open output file '" + path + "'");
  out << header << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i)
      out << (i ? "," : "") << fmt17(r[i]);
    out << "\n";
  }
}

json envelope(const std::string& command, const Options& o) {
  json cfg{{"seed", o.seed}};
  if (!o.subset.empty()) cfg["subset"] = o.subset;
  if (!o.kinematics.empty()) cfg["kinematics"] = o.kinematics;
  if (!o.out.empty()) cfg["out"] = o.out;
  if (command == "pinches") cfg["max_size"] = o.max_size;
  if (command == "asympt" && !o.dimension.empty()) cfg["dimension"] = o.dimension;
  if (command == "landau" || command == "asympt") cfg["branch"] = o.branch;
  if (command == "verify" || command == "oracle") {
    cfg["d"] = o.d;
    cfg["samples"] = o.samples;
    cfg["theta"] = o.theta;
    cfg["eps_min"] = o.eps_min;
    cfg["eps_max"] = o.eps_max;
    cfg["eps_points"] = o.eps_points;
    cfg["r_max"] = o.r_max;
  }
  json rep{{"tool", "pinchlab"},
           {"tool_version", kToolVersion},
           {"command", command},
           {"config", cfg}};
  if (!o.spec.empty()) rep["spec"] = o.spec;
  return rep;
}

// ---------------------------------------------------------------- pinches --

json cmd_pinches(const Options& o) {
  Diagram dg = load_diagram_file(resolve_spec_path(o.spec));
  std::size_t max_size = o.max_size ? o.max_size : dg.propagators.size();
  if (max_size < 2)
    throw validation_error("--max-size must be at least 2: a pinch needs two "
                           "propagators");
  json rep = envelope("pinches", o);
  rep["diagram"] = dg.name;
  json subs = json::array();
  for (const auto& I : enumerate_subsets(dg, max_size)) {
    try {
      subs.push_back(pinch_to_json(solve_pinch(dg, I)));
    } catch (const Error& e) {
      json rec{{"subset", I},
               {"error", {{"kind", e.kind()}, {"message", e.what()}}}};
      subs.push_back(rec);
    }
  }
  rep["count"] = subs.size();
  rep["subsets"] = std::move(subs);
  return rep;
}

// ----------------------------------------------------------------- landau --

json cmd_landau(const Options& o) {
  Diagram dg = load_diagram_file(resolve_spec_path(o.spec));
  PinchSolution sol = solve_pinch(dg, parse_subset(o.subset));
  LandauPolynomial lp = landau_from_pinch(sol, o.branch);
  json rep = envelope("landau", o);
  rep["diagram"] = dg.name;
  rep["pinch"] = pinch_to_json(sol);
  rep["landau"] = landau_to_json(lp);
  return rep;
}

// ----------------------------------------------------------------- asympt --

json cmd_asympt(const Options& o) {
  json doc = load_doc(resolve_spec_path(o.spec));
  if (!o.dimension.empty()) {
    if (o.dimension == "d") {
      doc["dimension"] = "d";
    } else {
      try {
        std::size_t pos = 0;
        int v = std::stoi(o.dimension, &pos);
        if (pos != o.dimension.size() || v <= 0) throw std::invalid_argument("");
        doc["dimension"] = v;
      } catch (const std::exception&) {
        throw validation_error("--dimension takes \"d\" or a positive integer");
      }
    }
  }
  Diagram dg = parse_diagram(doc);
  PinchSolution sol = solve_pinch(dg, parse_subset(o.subset));
  AsymptoticExpansion ax = leading_coefficient(dg, sol, o.branch);
  json rep = envelope("asympt", o);
  rep["diagram"] = dg.name;
  rep["pinch"] = pinch_to_json(sol);
  rep["asympt"] = asympt_to_json(ax);
  return rep;
}

// ----------------------------------------------------------------- verify --

json cmd_verify(const Options& o) {
  json doc = load_doc(resolve_spec_path(o.spec));
  doc["dimension"] = o.d;
  Diagram dg = parse_diagram(doc);
  auto I = parse_subset(o.subset);
  PinchSolution sol = solve_pinch(dg, I);
  AsymptoticExpansion ax = leading_coefficient(dg, sol, o.branch);

  if (I.size() != 2)
    throw validation_error("verify drives the two-propagator threshold "
                           "family; the subset must have exactly two members");
  auto kin = parse_kinematics(o.kinematics);
  double m[2];
  for (int i = 0; i < 2; ++i) {
    Complex mv = dg.propagators[I[i]].mass.eval(kin);
    if (std::abs(mv.imag()) > 1e-12 || !(mv.real() > 0))
      throw validation_error("squared mass of propagator " +
                             std::to_string(I[i]) +
                             " must evaluate to a positive real number");
    m[i] = mv.real();
  }
  // scan along the ray s = s* + eps e^{i theta} off the threshold branch
  const double s_star =
      -(std::sqrt(m[0]) + std::sqrt(m[1])) * (std::sqrt(m[0]) + std::sqrt(m[1]));

  // predicted exponent: the emitted nu at the concrete dimension
  Complex nu_c = ax.exponent.eval(std::map<Sym, Complex>{});
  const double nu = nu_c.real();

  auto f = [&](double e) {
    Cplx s = Cplx(s_star, 0.0) + e * std::polar(1.0, o.theta);
    return bubble_numeric(s, m[0], m[1], o.d, o.r_max);
  };
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<double, Cplx>> raw;
  for (double e : eps_grid(o)) {
    Cplx v = f(e);
    raw.push_back({e, v});
    rows.push_back({e, v.real(), v.imag()});
  }
  write_csv(o.out, "eps,re,im", rows);

  json fit;
  if (std::abs(nu) < 1e-12) {
    LogFit lf = fit_log(raw);
    fit = {{"type", "log"},
           {"b_re", lf.b.real()},
           {"b_im", lf.b.imag()},
           {"a_re", lf.a.real()},
           {"a_im", lf.a.imag()},
           {"r_squared", lf.r_squared},
           {"matched", lf.r_squared >= 0.999}};
  } else {
    std::vector<std::pair<double, Cplx>> pts;
    for (const auto& [e, v] : raw) {
      (void)v;
      pts.push_back({e, extract2(f, e)});
    }
    SlopeFit sf = fit_slope(pts);
    fit = {{"type", "power"},
           {"slope", sf.slope},
           {"intercept", sf.intercept},
           {"r_squared", sf.r_squared},
           {"predicted", nu},
           {"matched", std::abs(sf.slope - nu) <= 0.05 && sf.r_squared >= 0.999}};
  }

  json rep = envelope("verify", o);
  rep["diagram"] = dg.name;
  rep["exponent"] = ax.exponent.str();
  rep["nu"] = nu;
  rep["classification"] = to_string(sol.classification);
  rep["warnings"] = ax.warnings;
  rep["s_star"] = s_star;
  rep["masses_squared"] = {m[0], m[1]};
  rep["fit"] = fit;
  json samples = json::array();
  for (const auto& r : rows) samples.push_back(r);
  rep["samples"] = std::move(samples);
  if (!o.out.empty()) rep["csv"] = o.out;
  return rep;
}

// ----------------------------------------------------------------- oracle --

// deterministic 64-bit stream for the self-test point cloud
struct SplitMix {
  std::uint64_t s;
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double u01() { return (double(next() >> 12) + 0.5) * 0x1.0p-52; }
};

json oracle_kernel(std::uint64_t seed) {
  SplitMix rng{seed * 0x9e3779b97f4a7c15ULL + 1};
  double max_rel = 0.0;
  int pairs = 0;
  while (pairs < 100) {
    Cplx xi{rng.u01() * 10.0 - 5.0, rng.u01() * 10.0 - 5.0};
    Cplx eta{rng.u01() * 10.0 - 5.0, rng.u01() * 10.0 - 5.0};
    if (std::abs(xi - eta) < 1.0) continue; // well-separated pairs only
    ++pairs;
    Cplx want = Cplx(0.0, 2.0 * kPi) / (xi - eta);
    Cplx got = residue_kernel(xi, eta, 0.5 * std::abs(xi - eta), 256);
    max_rel = std::max(max_rel, std::abs(got - want) / std::abs(want));
  }
  return {{"pairs", pairs},
          {"max_rel_error", max_rel},
          {"tolerance", 1e-8},
          {"pass", max_rel <= 1e-8}};
}

json oracle_morse() {
  json out = json::array();
  for (int n : {1, 3, 4, 5}) {
    std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) q[i][i] = 1.0;
    auto f = [&](double e) { return Cplx(morse_integral(q, e, 2.0)); };
    const bool cubic = n == 5;
    std::vector<std::pair<double, Cplx>> pts;
    for (double e : {1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4})
      pts.push_back({e, cubic ? extract3(f, e) : extract2(f, e)});
    SlopeFit sf = fit_slope(pts);
    const double predicted = -1.0 + n / 2.0;
    // measured signed coefficient of the singular power (log power n/2-1
    // for even n, where the extractor maps eps^p log eps to a pure power)
    double coef;
    if (n % 2 == 1) {
      double e0 = cubic ? 1e-5 : 1e-4;
      double gain = cubic ? extract3_gain(predicted) : extract2_gain(predicted);
      coef = (cubic ? extract3(f, e0) : extract2(f, e0)).real() /
             (gain * std::pow(e0, predicted));
    } else {
      coef = extract2(f, 1e-4).real() / (2.0 * std::log(2.0) * 1e-4);
    }
    const double quoted = 2.0 * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0);
    out.push_back({{"n", n},
                   {"slope", sf.slope},
                   {"predicted", predicted},
                   {"r_squared", sf.r_squared},
                   {"slope_pass", std::abs(sf.slope - predicted) <= 0.02},
                   {"measured_coefficient", coef},
                   {"quoted_coefficient", quoted},
                   {"ratio_measured_to_quoted", std::abs(coef) / quoted}});
  }
  return out;
}

json oracle_qed(const Options& o, std::vector<std::vector<double>>& rows) {
  std::vector<std::pair<double, Cplx>> pts;
  json points = json::array();
  std::uint64_t i = 0;
  for (double e : {1e-1, 3.162e-2, 1e-2, 3.162e-3, 1e-3}) {
    McEstimate mc =
        qed_reduced_numeric(e, o.d, o.samples, (o.seed + 1) * 1000003 + i++);
    double rad = qed_reduced_radial(e);
    pts.push_back({e, Cplx(mc.value)});
    rows.push_back({e, mc.value, mc.std_error, rad});
    points.push_back({{"e_l", e},
                      {"mc", mc.value},
                      {"std_error", mc.std_error},
                      {"samples", mc.samples},
                      {"radial", rad}});
  }
  SlopeFit sf = fit_slope(pts);
  return {{"points", points},
          {"slope", sf.slope},
          {"r_squared", sf.r_squared},
          {"predicted", -1.0},
          {"pass", std::abs(sf.slope + 1.0) <= 0.1}};
}

json cmd_oracle(const Options& o) {
  if (o.d != 3)
    throw validation_error("the oracle self-tests run the reduced integral "
                           "at d = 3");
  json rep = envelope("oracle", o);
  rep["kernel"] = oracle_kernel(o.seed);
  rep["morse"] = oracle_morse();
  std::vector<std::vector<double>> rows;
  rep["qed"] = oracle_qed(o, rows);
  write_csv(o.out, "e_l,mc,std_error,radial", rows);
  if (!o.out.empty()) rep["csv"] = o.out;
  return rep;
}

// ------------------------------------------------------------------- main --

void add_common(CLI::App* sub, Options& o, bool with_spec = true) {
  if (with_spec)
    sub->add_option("spec", o.spec, "diagram spec file (.json or .toml)")
        ->required();
  sub->add_option("--config", o.config, "TOML config mirroring the flags");
  sub->add_option("--seed", o.seed, "random seed (default 0)");
  sub->add_option("--out", o.out, "CSV output path");
  sub->add_option("--kinematics", o.kinematics,
                  "numeric overrides, e.g. \"m1_sq=1.0,s=-4.41\"");
}

void overlay_config(CLI::App* sub, Options& o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw validation_error("cannot open config file '" + o.config + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json cfg = parse_toml_lite(buf.str());
  if (!cfg.is_object()) throw schema_error("config must be a TOML table");

  auto unset = [&](const std::string& flag) {
    auto* opt = sub->get_option_no_throw(flag);
    return opt != nullptr && opt->count() == 0;
  };
  auto want = [&](const char* key) { return cfg.contains(key); };
  try {
    if (want("seed") && unset("--seed")) o.seed = cfg["seed"].get<std::uint64_t>();
    if (want("samples") && unset("--samples"))
      o.samples = cfg["samples"].get<std::uint64_t>();
    if (want("d") && unset("--d")) o.d = cfg["d"].get<int>();
    if (want("theta") && unset("--theta")) o.theta = cfg["theta"].get<double>();
    if (want("subset") && unset("--subset"))
      o.subset = cfg["subset"].get<std::string>();
    if (want("dimension") && unset("--dimension"))
      o.dimension = cfg["dimension"].is_string()
                        ? cfg["dimension"].get<std::string>()
                        : std::to_string(cfg["dimension"].get<int>());
    if (want("max_size") && unset("--max-size"))
      o.max_size = cfg["max_size"].get<std::size_t>();
    if (want("branch") && unset("--branch"))
      o.branch = cfg["branch"].get<std::size_t>();
    if (want("out") && unset("--out")) o.out = cfg["out"].get<std::string>();
    if (want("kinematics") && unset("--kinematics"))
      o.kinematics = cfg["kinematics"].get<std::string>();
    if (want("r_max") && unset("--r-max")) o.r_max = cfg["r_max"].get<double>();
    if (want("eps_min") && unset("--eps-min"))
      o.eps_min = cfg["eps_min"].get<double>();
    if (want("eps_max") && unset("--eps-max"))
      o.eps_max = cfg["eps_max"].get<double>();
    if (want("eps_points") && unset("--eps-points"))
      o.eps_points = cfg["eps_points"].get<int>();
  } catch (const json::exception& e) {
    throw schema_error(std::string("config value has the wrong type: ") +
                       e.what());
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"pinch analysis of loop integrals"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  Options o;

  CLI::App* pinches =
      app.add_subcommand("pinches", "enumerate and solve candidate subsets");
  add_common(pinches, o);
  pinches->add_option("--max-size", o.max_size,
                      "largest subset size (default: all propagators)");

  CLI::App* landau =
      app.add_subcommand("landau", "Landau polynomial of one subset");
  add_common(landau, o);
  landau->add_option("--subset", o.subset, "propagator indices, e.g. \"0,1\"");
  landau->add_option("--branch", o.branch, "radical sign branch (default 0)");

  CLI::App* asympt =
      app.add_subcommand("asympt", "leading asymptotics near the pinch");
  add_common(asympt, o);
  asympt->add_option("--subset", o.subset, "propagator indices, e.g. \"0,1\"");
  asympt->add_option("--branch", o.branch, "radical sign branch (default 0)");
  asympt->add_option("--dimension", o.dimension,
                     "override the spec dimension: \"d\" or an integer");

  CLI::App* verify = app.add_subcommand(
      "verify", "numeric scan of a two-propagator threshold family");
  add_common(verify, o);
  verify->add_option("--subset", o.subset, "two propagator indices");
  verify->add_option("--branch", o.branch, "radical sign branch (default 0)");
  verify->add_option("--d", o.d, "spacetime dimension for the scan (default 3)");
  verify->add_option("--theta", o.theta,
                     "approach-ray angle (default -pi/2)");
  verify->add_option("--r-max", o.r_max, "radial cutoff (default 50)");
  verify->add_option("--eps-min", o.eps_min, "smallest eps (default 1e-4)");
  verify->add_option("--eps-max", o.eps_max, "largest eps (default 1e-2)");
  verify->add_option("--eps-points", o.eps_points, "grid size (default 7)");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "run the contour/quadratic-model/coincidence self-tests");
  add_common(oracle, o, /*with_spec=*/false);
  oracle->add_option("--samples", o.samples,
                     "Monte Carlo evaluations per point (default 2000000)");
  oracle->add_option("--d", o.d, "dimension for the reduced integral (3)");

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  try {
    overlay_config(sub, o);
    json rep;
    if (sub == pinches) rep = cmd_pinches(o);
    else if (sub == landau) rep = cmd_landau(o);
    else if (sub == asympt) rep = cmd_asympt(o);
    else if (sub == verify) rep = cmd_verify(o);
    else rep = cmd_oracle(o);
    std::cout << rep.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
