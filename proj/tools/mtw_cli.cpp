#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mtw/ale.hpp"
#include "mtw/einstein_weyl.hpp"
#include "mtw/errors.hpp"
#include "report.hpp"

using namespace mtw;
using mtw::report::Json;

namespace {

constexpr double kPi = std::numbers::pi;

struct RunConfig {
  std::string command;
  BranchConfig curve = canonical_config(2);
  int k = 1;
  double theta = 0.0;
  int trials = 20;
  int grid = 0;  // 0: command default
  unsigned long long seed = 1;
  std::string out;
  int steps = 512;
  double u = kPi / 2, v = kPi;
  std::optional<double> anchor_z, anchor_w;
  double xi = 0.7;
  std::vector<double> ale_points{-3.0, -2.0, -1.0, 0.0, 1.0, 2.0};
  std::optional<double> ale_beta;
};

[[noreturn]] void schema(const std::string& msg) { throw ConfigError("schema: " + msg); }

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) schema(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) schema("unknown key '" + it.key() + "' in " + where);
}

double get_number(const Json& j, const std::string& name) {
  if (!j.is_number()) schema(name + " must be a number");
  return j.get<double>();
}

int get_int(const Json& j, const std::string& name) {
  if (!j.is_number_integer()) schema(name + " must be an integer");
  return j.get<int>();
}

std::vector<double> get_points(const Json& j, const std::string& name) {
  if (!j.is_array()) schema(name + " must be an array");
  std::vector<double> pts;
  for (const auto& e : j) pts.push_back(get_number(e, name + " entry"));
  if (pts.empty()) schema(name + " is empty");
  return pts;
}

void load_config(const std::string& path, RunConfig& rc) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  Json doc;
  try {
    doc = Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc,
             {"command", "curve", "k", "theta", "trials", "grid", "seed", "out", "steps", "point",
              "anchor", "xi", "ale"},
             "config");
  if (doc.contains("command")) {
    if (!doc["command"].is_string()) schema("command must be a string");
    rc.command = doc["command"].get<std::string>();
  }
  if (doc.contains("curve")) {
    const Json& c = doc["curve"];
    check_keys(c, {"branch_points", "genus"}, "curve");
    if (!c.contains("branch_points")) schema("curve needs branch_points");
    rc.curve = BranchConfig::from_points(get_points(c["branch_points"], "branch_points"));
    if (c.contains("genus") && get_int(c["genus"], "genus") != rc.curve.genus)
      schema("genus does not match the number of branch points");
  }
  if (doc.contains("k")) rc.k = get_int(doc["k"], "k");
  if (doc.contains("theta")) rc.theta = get_number(doc["theta"], "theta");
  if (doc.contains("trials")) rc.trials = get_int(doc["trials"], "trials");
  if (doc.contains("grid")) rc.grid = get_int(doc["grid"], "grid");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) schema("seed must be a non-negative integer");
    rc.seed = doc["seed"].get<unsigned long long>();
  }
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) schema("out must be a string");
    rc.out = doc["out"].get<std::string>();
  }
  if (doc.contains("steps")) rc.steps = get_int(doc["steps"], "steps");
  if (doc.contains("point")) {
    check_keys(doc["point"], {"u", "v"}, "point");
    if (doc["point"].contains("u")) rc.u = get_number(doc["point"]["u"], "point.u");
    if (doc["point"].contains("v")) rc.v = get_number(doc["point"]["v"], "point.v");
  }
  if (doc.contains("anchor")) {
    check_keys(doc["anchor"], {"z", "w"}, "anchor");
    if (doc["anchor"].contains("z")) rc.anchor_z = get_number(doc["anchor"]["z"], "anchor.z");
    if (doc["anchor"].contains("w")) rc.anchor_w = get_number(doc["anchor"]["w"], "anchor.w");
  }
  if (doc.contains("xi")) rc.xi = get_number(doc["xi"], "xi");
  if (doc.contains("ale")) {
    check_keys(doc["ale"], {"a", "beta"}, "ale");
    if (doc["ale"].contains("a")) rc.ale_points = get_points(doc["ale"]["a"], "ale.a");
    if (doc["ale"].contains("beta")) rc.ale_beta = get_number(doc["ale"]["beta"], "ale.beta");
  }
}

void validate(const RunConfig& rc) {
  const int nk = 1 << (rc.curve.genus - 1);
  if (rc.k < 1 || rc.k > nk) schema("k must lie in 1.." + std::to_string(nk));
  if (rc.trials < 1) schema("trials must be positive");
  if (rc.grid < 0) schema("grid must be non-negative");
  if (rc.steps < 8) schema("steps must be at least 8");
  if (!std::isfinite(rc.theta) || !std::isfinite(rc.u) || !std::isfinite(rc.v) || !std::isfinite(rc.xi))
    schema("angles must be finite");
}

Json vec(const VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json matrix(const MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec(m.row(r).transpose()));
  return a;
}

Json jac_point(const JacPoint& p) { return Json{{"re", vec(p.re)}, {"im", vec(p.im)}}; }

Json curve_json(const BranchConfig& cfg) {
  Json pts = Json::array();
  for (double x : cfg.points) pts.push_back(x);
  return Json{{"genus", cfg.genus}, {"branch_points", pts}};
}

Json line_json(const MinitwistorLine& line) {
  Json nodes = Json::array();
  for (const auto& n : line.nodes) nodes.push_back(Json::array({n.z, n.w, n.y}));
  Json circle = Json::array();
  for (const auto& c : line.circle) circle.push_back(Json::array({c.z, c.w, c.y}));
  Json j{{"kind", to_string(line.kind)}, {"coefficients", vec(line.coeffs)}, {"nodes", nodes},
         {"node_margin", line.node_margin}};
  if (line.kind == LineKind::Regular) j["arc"] = Json::array({line.arc_lo, line.arc_hi});
  if (line.kind == LineKind::Irregular) {
    Json feet = Json::array();
    for (double x : line.line_feet) feet.push_back(x);
    j["line_feet"] = feet;
    j["conic_z"] = line.conic_z;
  }
  j["circle"] = circle;
  return j;
}

void emit(const RunConfig& rc, const Json& summary, const std::string& artifact = "") {
  if (!rc.out.empty()) report::write_atomic(rc.out, artifact.empty() ? report::dump(summary) : artifact);
  if (!artifact.empty() && rc.out.empty()) {
    std::cout << artifact;
    return;
  }
  std::cout << report::dump(summary);
}

Json run_periods(const RunConfig& rc) {
  Jacobian jac(rc.curve);
  const PeriodLattice& lat = jac.lattice();
  const int g = lat.genus();
  double worst_real = 0.0, worst_imag = 0.0;
  for (int i = 0; i < g; ++i) {
    const VectorXcd a = lat.columns.col(i), b = lat.columns.col(g + i);
    worst_real = std::max(worst_real, a.imag().norm() / a.norm());
    worst_imag = std::max(worst_imag, b.real().norm() / b.norm());
  }
  Json halves = Json::array();
  for (const auto& [r, p] : jac.half_period_table())
    halves.push_back(Json{{"point", r.label()}, {"value", jac_point(p)}});
  return Json{{"command", "periods"},
              {"curve", curve_json(rc.curve)},
              {"real_block", matrix(lat.real_block)},
              {"imag_block", matrix(lat.imag_block)},
              {"reality",
               Json{{"real_periods_max_imag_ratio", worst_real},
                    {"imag_periods_max_real_ratio", worst_imag},
                    {"imag_condition", lat.imag_condition},
                    {"ill_conditioned", lat.ill_conditioned}}},
              {"half_periods", halves}};
}

void run_seifert(const RunConfig& rc) {
  Jacobian jac(rc.curve);
  const int g = rc.curve.genus;
  const int grid = rc.grid > 0 ? rc.grid : 64;
  const auto surfaces = enumerate_seifert(jac, grid);
  std::vector<std::string> header{"k", "branch", "xi_angle", "eta_angle"};
  for (int i = 1; i <= g; ++i) header.push_back("p" + std::to_string(i));
  for (int i = 0; i <= g + 1; ++i) header.push_back("c" + std::to_string(i));
  header.push_back("c_w");
  header.push_back("residual");
  report::Csv csv(header);
  Json list = Json::array();
  for (const auto& s : surfaces) {
    double worst_gap = INFINITY, worst_res = 0.0;
    for (size_t n = 0; n < s.samples.size(); ++n) {
      const auto& sp = s.samples[n];
      const auto& h = s.hyperplanes[n];
      std::vector<double> row{double(s.data.k), double(sp.branch), sp.xi_angle, sp.eta_angle};
      for (int i = 0; i < g; ++i) row.push_back(sp.tangency[i]);
      for (Eigen::Index i = 0; i < h.coeffs.size(); ++i) row.push_back(h.coeffs[i]);
      row.push_back(h.residual);
      csv.row(row);
      worst_gap = std::min(worst_gap, h.gap_ratio);
      worst_res = std::max(worst_res, h.residual);
    }
    Json rho = Json::array();
    for (const auto& r : s.data.rho) rho.push_back(r.label());
    list.push_back(Json{{"k", s.data.k},
                        {"rho", rho},
                        {"attempted", s.attempted},
                        {"failures", s.failures},
                        {"min_gap_ratio", worst_gap},
                        {"max_residual", worst_res},
                        {"singular", jac_point(s.singular)},
                        {"singular_prime", jac_point(s.singular_prime)}});
  }
  Json summary{{"command", "seifert"}, {"curve", curve_json(rc.curve)}, {"grid", grid}, {"surfaces", list}};
  if (!rc.out.empty()) report::write_atomic(rc.out, csv.str());
  std::cout << report::dump(summary);
}

Json run_line(const RunConfig& rc) {
  Jacobian jac(rc.curve);
  SeifertFamily fam(jac, boundary_data(rc.curve.genus, rc.k));
  const VectorXd c = ew_chart(fam, EWPoint{rc.k, rc.u, rc.v, rc.theta});
  const MinitwistorLine line = build_line(rc.curve, c);
  return Json{{"command", "line"},
              {"curve", curve_json(rc.curve)},
              {"point", Json{{"k", rc.k}, {"u", rc.u}, {"v", rc.v}, {"theta", rc.theta}}},
              {"line", line_json(line)}};
}

Json geodesic_json(const Geodesic& geo, bool with_samples) {
  Json j{{"anchor", Json{{"z", geo.anchor_z}, {"w", geo.anchor_w}}},
         {"theta", geo.theta},
         {"closure_gap", geo.closure_gap},
         {"simple", geo.simple},
         {"axis_crossings", geo.axis_crossings},
         {"axis_prime_crossings", geo.axis_prime_crossings},
         {"transversality", geo.transversality},
         {"max_incidence", geo.max_incidence}};
  Json samples = Json::array();
  for (size_t i = 0; i < geo.samples.size(); ++i) {
    Json s{{"u", geo.samples[i].u}, {"v", geo.samples[i].v}};
    if (with_samples) s["coeffs"] = vec(geo.coeffs(i));
    samples.push_back(s);
  }
  j["samples"] = samples;
  return j;
}

Json run_geodesic(const RunConfig& rc) {
  Jacobian jac(rc.curve);
  SeifertFamily fam(jac, boundary_data(rc.curve.genus, rc.k));
  const int g = rc.curve.genus;
  const double z = rc.anchor_z.value_or(0.5 * (rc.curve.lambda(g + 1) + rc.curve.lambda_prime(g + 1)));
  const double w = rc.anchor_w.value_or(0.0);
  Geodesic geo = geodesic_through_disk_point(fam, z, w, rc.steps);
  if (rc.theta != 0.0)
    geo = geodesic_spacelike(fam, s1_act(rc.theta, geo.x), s1_act(rc.theta, geo.y), rc.steps);
  return Json{{"command", "geodesic"}, {"curve", curve_json(rc.curve)}, {"k", rc.k},
              {"geodesic", geodesic_json(geo, true)}};
}

Json run_metric(const RunConfig& rc) {
  Jacobian jac(rc.curve);
  SeifertFamily fam(jac, boundary_data(rc.curve.genus, rc.k));
  const VectorXd c = ew_chart(fam, EWPoint{rc.k, rc.u, rc.v, rc.theta});
  const ConformalMetric m = conformal_metric(rc.curve, c);
  std::string sig;
  for (int i = 0; i < 3; ++i) sig += m.eigenvalues[i] < 0 ? '-' : '+';
  return Json{{"command", "metric"},
              {"curve", curve_json(rc.curve)},
              {"point", Json{{"k", rc.k}, {"u", rc.u}, {"v", rc.v}, {"theta", rc.theta}}},
              {"matrix", matrix(m.matrix)},
              {"eigenvalues", vec(m.eigenvalues)},
              {"signature", sig},
              {"lorentzian", m.lorentzian()}};
}

Json run_zoll(const RunConfig& rc) {
  Jacobian jac(rc.curve);
  SeifertFamily fam(jac, boundary_data(rc.curve.genus, rc.k));
  const ZollReport z = zoll_suite(fam, rc.trials, rc.seed, rc.steps);
  Json list = Json::array();
  for (const auto& geo : z.geodesics) list.push_back(geodesic_json(geo, false));
  return Json{{"command", "zoll"},
              {"curve", curve_json(rc.curve)},
              {"k", rc.k},
              {"seed", rc.seed},
              {"trials", z.trials},
              {"closed", z.closed},
              {"simple", z.simple},
              {"axis_ok", z.axis_ok},
              {"worst_gap", z.worst_gap},
              {"worst_transversality", z.worst_transversality},
              {"pass", z.closed == z.trials && z.simple == z.trials && z.axis_ok == z.trials},
              {"geodesics", list}};
}

Json run_foliation(const RunConfig& rc) {
  Jacobian jac(rc.curve);
  SeifertFamily fam(jac, boundary_data(rc.curve.genus, rc.k));
  const FoliationReport f = foliation_check(fam, rc.xi, rc.grid > 0 ? rc.grid : 200);
  return Json{{"command", "foliation"},
              {"curve", curve_json(rc.curve)},
              {"k", rc.k},
              {"xi_angle", f.xi_angle},
              {"arcs", f.arcs},
              {"grid_points", f.grid_points},
              {"min_distance", f.min_distance},
              {"coverage", f.coverage},
              {"second_lap_coverage", f.second_lap_coverage},
              {"pass", f.pass()}};
}

double distance(const SurfacePoint& a, const SurfacePoint& b) {
  return std::max({std::abs(a.z - b.z), std::abs(a.u - b.u), std::abs(a.v - b.v)});
}

Json run_ale(const RunConfig& rc) {
  const AleConfig cfg = AleConfig::make(rc.ale_points);
  std::mt19937_64 rng(rc.seed);
  const int samples = 1000;
  Json a = Json::array();
  for (double x : cfg.a) a.push_back(x);
  Json j{{"command", "ale"}, {"l", cfg.l}, {"a", a}};
  double residual = 0.0, intertwining = 0.0;
  bool pass = false;
  if (cfg.l % 2 == 1) {
    const BranchConfig target = odd_target(cfg);
    for (int n = 0; n < samples; ++n) {
      const AlePoint p = random_ale_point(cfg, rng);
      const SurfacePoint s = map_odd(cfg, p);
      residual = std::max(residual, surface_residual(target, s));
      const SurfacePoint t = map_odd(cfg, ale_real_structure(cfg, p));
      intertwining = std::max(intertwining, distance(t, real_structure(s)) / (1.0 + std::abs(s.u) + std::abs(s.v)));
    }
    j["map"] = "odd";
    pass = residual < 1e-12 && intertwining < 1e-10;
  } else {
    const double beta = rc.ale_beta.value_or(0.5 * (cfg.a[0] + cfg.a[1]));
    const EvenMap m = map_even(cfg, beta, 100, rc.seed);
    for (int n = 0; n < samples; ++n) {
      const AlePoint p = random_ale_point(cfg, rng);
      const SurfacePoint s = m(cfg, p);
      residual = std::max(residual, surface_residual(m.target, s));
      const SurfacePoint t = m(cfg, ale_real_structure(cfg, p));
      intertwining = std::max(intertwining, distance(t, real_structure(s)) / (1.0 + std::abs(s.u) + std::abs(s.v)));
    }
    j["map"] = "even";
    j["beta"] = beta;
    j["c"] = m.c;
    pass = m.c > 0 && residual < 1e-10 && intertwining < 1e-10;
  }
  j["samples"] = samples;
  j["residual"] = residual;
  j["intertwining"] = intertwining;
  j["pass"] = pass;
  return j;
}

void run_export(const RunConfig& rc) {
  Jacobian jac(rc.curve);
  const int g = rc.curve.genus;
  const int samples = rc.grid > 0 ? rc.grid : 256;
  std::vector<std::string> header{"k", "circle", "sample"};
  for (int i = 1; i <= g; ++i) header.push_back("re" + std::to_string(i));
  report::Csv csv(header);
  for (const auto& d : all_boundary_data(g)) {
    SeifertFamily fam(jac, d);
    for (int c = 0; c < 2; ++c) {
      const auto pts = fam.boundary_circle(c == 1, samples);
      for (size_t n = 0; n < pts.size(); ++n) {
        std::vector<double> row{double(d.k), double(c), double(n)};
        for (int i = 0; i < g; ++i) row.push_back(pts[n].re[i]);
        csv.row(row);
      }
    }
  }
  if (!rc.out.empty()) {
    report::write_atomic(rc.out, csv.str());
    std::cout << report::dump(Json{{"command", "export"}, {"file", rc.out}, {"samples", samples}});
  } else {
    std::cout << csv.str();
  }
}

void print_error(const std::string& kind, const std::string& tag, const std::string& msg) {
  std::cout << report::dump(Json{{"status", "error"}, {"kind", kind}, {"error", tag}, {"message", msg}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minitwistor and Einstein-Weyl numerics"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::optional<int> k, trials, grid;
  std::optional<double> theta;
  std::optional<unsigned long long> seed;
  std::optional<std::string> out;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--k", k, "boundary data index");
  app.add_option("--theta", theta, "circle angle (radians)");
  app.add_option("--trials", trials, "number of random trials");
  app.add_option("--grid", grid, "grid resolution");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out, "output file");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"periods", "period lattice and reality report"},
      {"seifert", "Seifert surface census (CSV samples with --out)"},
      {"line", "minitwistor line at a point (u, v, theta)"},
      {"geodesic", "spacelike geodesic through an anchor"},
      {"metric", "conformal metric at a point"},
      {"zoll", "random geodesics and closure statistics"},
      {"foliation", "foliation check of the disk"},
      {"ale", "ALE bridge pass/fail"},
      {"export", "boundary circles as CSV"}};
  for (const auto& [name, desc] : commands) app.add_subcommand(name, desc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  RunConfig rc;
  try {
    if (!config_path.empty()) load_config(config_path, rc);
    rc.command = app.get_subcommands().front()->get_name();
    if (k) rc.k = *k;
    if (theta) rc.theta = *theta;
    if (trials) rc.trials = *trials;
    if (grid) rc.grid = *grid;
    if (seed) rc.seed = *seed;
    if (out) rc.out = *out;
    validate(rc);

    const std::string& cmd = rc.command;
    if (cmd == "periods") emit(rc, run_periods(rc));
    else if (cmd == "seifert") run_seifert(rc);
    else if (cmd == "line") emit(rc, run_line(rc));
    else if (cmd == "geodesic") emit(rc, run_geodesic(rc));
    else if (cmd == "metric") emit(rc, run_metric(rc));
    else if (cmd == "zoll") emit(rc, run_zoll(rc));
    else if (cmd == "foliation") emit(rc, run_foliation(rc));
    else if (cmd == "ale") emit(rc, run_ale(rc));
    else if (cmd == "export") run_export(rc);
  } catch (const ConfigError& e) {
    print_error("config", "ConfigError", e.what());
    return 1;
  } catch (const NumericalError& e) {
    print_error("numerical", e.tag(), e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    print_error("io", "FilesystemError", e.what());
    return 1;
  }
  return 0;
}
