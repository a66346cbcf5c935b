#include "orthonet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "orthonet/catalog.hpp"
#include "orthonet/combescure.hpp"
#include "orthonet/guichard.hpp"
#include "orthonet/ribaucour.hpp"
#include "orthonet/surface.hpp"
#include "orthonet/system.hpp"

namespace orthonet::cli {

using nlohmann::json;

namespace {

const char* kSchema = "orthonet/1";

const std::vector<std::string> kOperations{"verify", "associate", "dualize", "backlund", "decompose", "analyze", "export"};
const std::vector<std::string> kChecks{"orthogonality", "lame", "metric", "frame", "frame-system", "beta", "determinant",
                                       "point", "guichard"};
const std::vector<std::string> kSources{"seed", "associated", "dual", "backlund"};
const std::vector<std::string> kFields{"H1", "H2", "H3", "chi", "x", "y", "z"};

bool one_of(const std::string& s, const std::vector<std::string>& set) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

json vec(const Eigen::Vector3d& v) { return json::array({v[0], v[1], v[2]}); }

json lame_at(const OrthogonalSystem& s, const Node& p) {
  return json::array({s.H[0].at(p), s.H[1].at(p), s.H[2].at(p)});
}

void validate(const RunConfig& cfg) {
  if (!one_of(cfg.operation, kOperations)) throw UsageError("unknown operation " + cfg.operation);
  if (cfg.n < 5) throw UsageError("n must be at least 5");
  if (cfg.check.order != 2 && cfg.check.order != 4) throw UsageError("order must be 2 or 4");
  if (cfg.check.collar < 0 || 2 * cfg.check.collar >= cfg.n) throw UsageError("collar does not fit the grid");
  if (!(cfg.check.factor > 0)) throw UsageError("factor must be positive");
  if (cfg.check.tolerance && !(*cfg.check.tolerance >= 0)) throw UsageError("tolerance must be non-negative");
  for (const auto& c : cfg.checks)
    if (!one_of(c, kChecks)) throw UsageError("unknown check " + c);
  if (cfg.format != "obj" && cfg.format != "csv") throw UsageError("format must be obj or csv");
  if (!one_of(cfg.field, kFields)) throw UsageError("unknown field " + cfg.field);
  if (!one_of(cfg.source, kSources)) throw UsageError("unknown source " + cfg.source);
  if (cfg.axis && (*cfg.axis < 0 || *cfg.axis > 2)) throw UsageError("axis must be 0, 1 or 2");
  if (cfg.alpha == 0) throw UsageError("alpha must be non-zero");
}

struct Setup {
  AnalyticChart chart;
  GridSpec grid;
  Node base;
  OrthogonalSystem sys;
};

Setup setup(const RunConfig& cfg) {
  std::optional<AnalyticChart> chart;
  try {
    chart = instantiate(cfg.chart, cfg.chart_c);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  const auto lo = cfg.lo.value_or(chart->meta().box_lo);
  const auto hi = cfg.hi.value_or(chart->meta().box_hi);
  std::optional<GridSpec> grid;
  try {
    grid = GridSpec(lo, hi, {cfg.n, cfg.n, cfg.n});
  } catch (const std::exception& e) {
    throw UsageError(std::string("invalid grid: ") + e.what());
  }
  const Node base = cfg.base ? Node{(*cfg.base)[0], (*cfg.base)[1], (*cfg.base)[2]}
                             : Node{cfg.n / 2, cfg.n / 2, cfg.n / 2};
  if (!grid->contains(base)) throw UsageError("base node outside the grid");
  try {
    return {*chart, *grid, base, sample(*chart, *grid, base)};
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
}

BianchiIntegration bianchi(const Setup& s, const RunConfig& cfg) {
  const auto& q = cfg.seed;
  return integrate_bianchi(s.sys, cfg.alpha, {q[0], q[1], q[2]}, {q[3], q[4], q[5]}, s.base, cfg.check);
}

void add(std::vector<ResidualReport>& out, std::pair<ResidualReport, ResidualReport> p) {
  out.push_back(std::move(p.first));
  out.push_back(std::move(p.second));
}

void add(std::vector<ResidualReport>& out, const std::vector<ResidualReport>& more) {
  out.insert(out.end(), more.begin(), more.end());
}

json chi_json(const OrthogonalSystem& s, const CheckOptions& opts) {
  const auto k = classify_chi(s, opts);
  return {{"kind", to_string(k.kind)}, {"constant", k.constant}, {"spread", k.spread}, {"tolerance", k.tolerance}};
}

// Relative trace budget: the alpha-trace defect of an integrated fbar enters
// trace R(f) with the factor (2 phi_lambda/|fbar|^2)^2.
ResidualReport lambda_trace(const OrthogonalSystem& r, const Setup& s, const BianchiIntegration& b,
                            const RunConfig& cfg) {
  const auto& fb = b.fbar;
  const ScalarField q = norm2(fb.f);
  const ScalarField defect = square(fb.H[0]) + square(fb.H[1]) - square(fb.H[2]) - cfg.alpha * cfg.alpha * q;
  const ScalarField phi = backlund_phi(s.sys.H, fb, cfg.alpha) + cfg.lambda;
  const ScalarField expected = 4 * cfg.alpha * cfg.alpha * cfg.lambda * phi / q;
  double budget = 0.0;
  for (std::size_t p = 0; p < s.grid.size(); ++p) {
    const double sp = 2 * phi.values()[p] / q.values()[p];
    budget = std::max(budget, sp * sp * std::abs(defect.values()[p]) / std::max(1.0, std::abs(expected.values()[p])));
  }
  return check_backlund_trace(r, s.sys, fb, cfg.alpha, cfg.lambda, cfg.check.tolerance.value_or(1e-10 + 10 * budget));
}

OrthogonalSystem source_system(const Setup& s, const RunConfig& cfg) {
  if (cfg.source == "seed") return s.sys;
  if (cfg.source == "backlund") return backlund(s.sys, bianchi(s, cfg).fbar, cfg.alpha, cfg.lambda, cfg.check);
  const auto a = build_associated(s.sys, cfg.c, s.base, 0.0, Eigen::Vector3d::Zero(), cfg.check);
  if (cfg.source == "associated") return a.system;
  return build_dual(s.sys, a.family, cfg.c, s.base, Eigen::Vector3d::Zero(), cfg.check);
}

void op_verify(const Setup& s, const RunConfig& cfg, std::vector<ResidualReport>& reports, json& values) {
  const auto& o = cfg.check;
  for (const auto& c : cfg.checks) {
    if (c == "orthogonality") reports.push_back(check_orthogonality(s.sys, o));
    if (c == "lame") add(reports, check_lame(s.sys, o));
    if (c == "metric") reports.push_back(check_metric(s.sys, o));
    if (c == "frame") reports.push_back(check_frame_orthonormality(s.sys, o));
    if (c == "frame-system") add(reports, check_frame_system(s.sys, o));
    if (c == "beta") reports.push_back(check_beta_consistency(s.sys, o));
    if (c == "determinant") reports.push_back(check_determinant(s.sys, o));
    if (c == "point")
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) reports.push_back(check_point_equation(s.sys, i, j, o));
    if (c == "guichard") add(reports, check_guichard(s.sys, o));
  }
  values["H_base"] = lame_at(s.sys, s.base);
  values["chi_base"] = chi_trace(s.sys).at(s.base);
  values["chi"] = chi_json(s.sys, o);
}

void op_associate(const Setup& s, const RunConfig& cfg, std::vector<ResidualReport>& reports, json& values) {
  const auto a = build_associated(s.sys, cfg.c, s.base, 0.0, Eigen::Vector3d::Zero(), cfg.check);
  add(reports, a.reports);
  reports.push_back(check_characterization(s.sys, a.system, cfg.check));
  reports.push_back(check_shared_beta(s.sys, a.system, cfg.check));
  values["H_base"] = lame_at(a.system, s.base);
  values["chi_base"] = chi_trace(a.system).at(s.base);
  values["chi"] = chi_json(a.system, cfg.check);
}

void op_dualize(const Setup& s, const RunConfig& cfg, std::vector<ResidualReport>& reports, json& values) {
  const auto a = build_associated(s.sys, cfg.c, s.base, 0.0, Eigen::Vector3d::Zero(), cfg.check);
  const auto d = build_dual(s.sys, a.family, cfg.c, s.base, Eigen::Vector3d::Zero(), cfg.check);
  add(reports, check_guichard(d, cfg.check));
  reports.push_back(check_gsystem_relation(s.sys, a.system, d, cfg.check));
  reports.push_back(check_shared_beta(s.sys, d, cfg.check));
  values["H_base"] = lame_at(d, s.base);
  values["chi_base"] = chi_trace(d).at(s.base);
}

void op_backlund(const Setup& s, const RunConfig& cfg, std::vector<ResidualReport>& reports, json& values) {
  const auto b = bianchi(s, cfg);
  reports.insert(reports.end(), {b.path_dependence, b.constraint, b.trace, b.metric});
  const auto r = backlund(s.sys, b.fbar, cfg.alpha, cfg.lambda, cfg.check);
  add(reports, r.diagnostics);
  reports.push_back(check_metric(r, cfg.check));
  if (cfg.lambda == 0)
    add(reports, check_guichard(r, cfg.check));
  else
    reports.push_back(lambda_trace(r, s, b, cfg));
  values["fbar_base"] = vec(b.fbar.f.at(s.base));
  values["phi_base"] = (backlund_phi(s.sys.H, b.fbar, cfg.alpha) + cfg.lambda).at(s.base);
  values["f_base"] = vec(r.f.at(s.base));
  values["H_base"] = lame_at(r, s.base);
  values["chi_base"] = chi_trace(r).at(s.base);
  if (cfg.permutability) {
    const auto a = build_associated(s.sys, cfg.c, s.base, 0.0, Eigen::Vector3d::Zero(), cfg.check);
    const auto d = build_dual(s.sys, a.family, cfg.c, s.base, Eigen::Vector3d::Zero(), cfg.check);
    add(reports, check_permutability(s.sys, a.system, d, b.fbar, cfg.alpha, cfg.check).reports);
  }
}

void op_decompose(const Setup& s, const RunConfig& cfg, std::vector<ResidualReport>& reports, json& values) {
  const auto b = bianchi(s, cfg);
  const auto data = induce_ribaucour_family(s.sys, b.fbar, cfg.lambda, s.base, cfg.check);
  const auto dec = decompose_ribaucour(s.sys, data, cfg.check);
  add(reports, dec.reports);
  const auto r = apply_ribaucour(s.sys, data, cfg.check);
  double diff = 0.0;
  for (std::size_t p = 0; p < s.grid.size(); ++p)
    diff = std::max(diff, (dec.reconstruction.at(p) - r.f.at(p)).norm() / std::max(1.0, r.f.at(p).norm()));
  reports.push_back(scalar_report("reconstruction", diff, cfg.check.tolerance.value_or(1e-12), s.grid));
  values["f_base"] = vec(r.f.at(s.base));
  values["fbar_inverted_base"] = vec(dec.fbar_inverted.f.at(s.base));
}

void op_analyze(const Setup& s, const RunConfig& cfg, std::vector<ResidualReport>&, json& values) {
  json families = json::array();
  for (int axis = 0; axis < 3; ++axis) {
    if (cfg.axis && *cfg.axis != axis) continue;
    const auto a = analyze_family(s.sys, axis, cfg.check);
    families.push_back({{"axis", axis},
                        {"parallel", a.parallel},
                        {"totally_umbilic", a.totally_umbilic},
                        {"cyclic", a.cyclic},
                        {"reports",
                         {to_json(a.parallel_report), to_json(a.umbilic_report), to_json(a.cyclic_report),
                          to_json(a.torsion_report)}}});
  }
  values["families"] = families;
}

void op_export(const Setup& s, const RunConfig& cfg, std::vector<ResidualReport>&, json& values) {
  const auto sys = source_system(s, cfg);
  const std::filesystem::path dir(cfg.export_dir);
  std::filesystem::create_directories(dir);
  const std::string stem = cfg.chart + "-" + cfg.source;
  json files = json::array();
  auto open = [&](const std::string& name) {
    const auto path = dir / name;
    std::ofstream os(path);
    if (!os) throw UsageError("cannot write " + path.string());
    files.push_back(path.string());
    return os;
  };
  if (cfg.format == "obj") {
    const int axis = cfg.axis.value_or(2);
    const std::vector<int> slices = cfg.slices.empty() ? std::vector<int>{cfg.n / 2} : cfg.slices;
    for (int idx : slices) {
      if (idx < 0 || idx >= s.grid.n(axis)) throw UsageError("slice index out of range");
      auto os = open(stem + "-axis" + std::to_string(axis) + "-" + std::to_string(idx) + ".obj");
      write_slice_obj(os, sys.f, axis, idx);
    }
  } else {
    ScalarField field;
    if (cfg.field == "chi") field = chi_trace(sys);
    else if (cfg.field[0] == 'H') field = sys.H[cfg.field[1] - '1'];
    else field = sys.f.c[cfg.field[0] - 'x'];
    auto os = open(stem + "-" + cfg.field + ".csv");
    write_csv(os, field);
  }
  values["files"] = files;
}

template <class T>
void read(const json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& into) {
  if (j.contains(key)) {
    if (j.at(key).is_null()) into.reset();
    else into = j.at(key).get<T>();
  }
}

}  // namespace

json to_json(const RunConfig& cfg) {
  json j{{"schema", kSchema},
         {"operation", cfg.operation},
         {"chart", cfg.chart},
         {"chart_c", cfg.chart_c},
         {"n", cfg.n},
         {"lo", cfg.lo ? json(*cfg.lo) : json(nullptr)},
         {"hi", cfg.hi ? json(*cfg.hi) : json(nullptr)},
         {"base", cfg.base ? json(*cfg.base) : json(nullptr)},
         {"checks", cfg.checks},
         {"c", cfg.c},
         {"alpha", cfg.alpha},
         {"lambda", cfg.lambda},
         {"seed", cfg.seed},
         {"permutability", cfg.permutability},
         {"axis", cfg.axis ? json(*cfg.axis) : json(nullptr)},
         {"slices", cfg.slices},
         {"format", cfg.format},
         {"field", cfg.field},
         {"source", cfg.source},
         {"order", cfg.check.order},
         {"collar", cfg.check.collar},
         {"factor", cfg.check.factor},
         {"tolerance", cfg.check.tolerance ? json(*cfg.check.tolerance) : json(nullptr)},
         {"output", cfg.output},
         {"export_dir", cfg.export_dir}};
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  static const std::set<std::string> keys{"schema", "operation", "chart",  "chart_c",    "n",      "lo",
                                          "hi",     "base",      "checks", "c",          "alpha",  "lambda",
                                          "seed",   "permutability", "axis", "slices", "format", "field",
                                          "source", "order",     "collar", "factor",     "tolerance", "output",
                                          "export_dir"};
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw UsageError("unknown config key " + k);
  if (j.contains("schema") && j.at("schema") != kSchema) throw UsageError("unsupported schema");
  RunConfig cfg;
  try {
    read(j, "operation", cfg.operation);
    read(j, "chart", cfg.chart);
    read(j, "chart_c", cfg.chart_c);
    read(j, "n", cfg.n);
    read(j, "lo", cfg.lo);
    read(j, "hi", cfg.hi);
    read(j, "base", cfg.base);
    read(j, "checks", cfg.checks);
    read(j, "c", cfg.c);
    read(j, "alpha", cfg.alpha);
    read(j, "lambda", cfg.lambda);
    read(j, "seed", cfg.seed);
    read(j, "permutability", cfg.permutability);
    read(j, "axis", cfg.axis);
    read(j, "slices", cfg.slices);
    read(j, "format", cfg.format);
    read(j, "field", cfg.field);
    read(j, "source", cfg.source);
    read(j, "order", cfg.check.order);
    read(j, "collar", cfg.check.collar);
    read(j, "factor", cfg.check.factor);
    read(j, "tolerance", cfg.check.tolerance);
    read(j, "output", cfg.output);
    read(j, "export_dir", cfg.export_dir);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

json run_report(const RunConfig& cfg, int& exit_code) {
  validate(cfg);
  const Setup s = setup(cfg);
  json report{{"schema", kSchema}, {"operation", cfg.operation}, {"config", to_json(cfg)},
              {"chart", s.chart.provenance()}, {"grid", to_json(s.grid)}};
  std::vector<ResidualReport> reports;
  json values = json::object();
  try {
    if (cfg.operation == "verify") op_verify(s, cfg, reports, values);
    if (cfg.operation == "associate") op_associate(s, cfg, reports, values);
    if (cfg.operation == "dualize") op_dualize(s, cfg, reports, values);
    if (cfg.operation == "backlund") op_backlund(s, cfg, reports, values);
    if (cfg.operation == "decompose") op_decompose(s, cfg, reports, values);
    if (cfg.operation == "analyze") op_analyze(s, cfg, reports, values);
    if (cfg.operation == "export") op_export(s, cfg, reports, values);
  } catch (const CheckFailed& e) {
    reports.push_back(e.report());
    report["error"] = {{"kind", "precondition"}, {"message", e.what()}};
  } catch (const DegenerateNode& e) {
    const Node& p = e.node();
    report["error"] = {{"kind", "degenerate"}, {"message", e.what()}, {"node", {p[0], p[1], p[2]}}};
  }
  json list = json::array();
  for (const auto& r : reports) list.push_back(to_json(r));
  report["reports"] = list;
  report["values"] = values;
  const bool pass = !report.contains("error") && all_pass(reports);
  report["pass"] = pass;
  exit_code = pass ? kPass : kCheckFailed;
  return report;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  int code = kUsage;
  json report;
  try {
    report = run_report(cfg, code);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  const std::string text = report.dump(2) + "\n";
  if (cfg.output.empty()) {
    out << text;
  } else {
    std::ofstream os(cfg.output);
    if (!os) {
      err << "error: cannot write " << cfg.output << "\n";
      return kUsage;
    }
    os << text;
  }
  return code;
}

namespace {

void grid_options(CLI::App* sub, RunConfig& cfg, std::vector<double>& lo, std::vector<double>& hi,
                  std::vector<int>& base, std::string& config) {
  sub->add_option("--config", config, "JSON run configuration; supersedes all other flags");
  sub->add_option("--chart", cfg.chart, "chart name (see list-charts)");
  sub->add_option("--chart-c", cfg.chart_c, "chart parameter c");
  sub->add_option("--n", cfg.n, "nodes per axis");
  sub->add_option("--lo", lo, "box corner x,y,z")->delimiter(',')->expected(3);
  sub->add_option("--hi", hi, "box corner x,y,z")->delimiter(',')->expected(3);
  sub->add_option("--base", base, "base node i,j,k")->delimiter(',')->expected(3);
  sub->add_option("--order", cfg.check.order, "finite difference order (2 or 4)");
  sub->add_option("--collar", cfg.check.collar, "boundary layers excluded from norms");
  sub->add_option("--factor", cfg.check.factor, "tolerance factor in factor * h^2 * scale");
  sub->add_option("--tolerance", cfg.check.tolerance, "absolute tolerance override");
  sub->add_option("--output,-o", cfg.output, "report path (default stdout)");
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Triply orthogonal systems, Guichard nets and their transforms on sampled grids", "orthonet"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::vector<double> lo, hi;
  std::vector<int> base;
  std::string config;
  std::vector<double> seed;

  app.add_subcommand("list-charts", "print the chart registry as JSON");

  auto* verify = app.add_subcommand("verify", "run residual checks on a sampled chart");
  verify->add_option("--checks", cfg.checks, "comma separated: orthogonality, lame, metric, frame, frame-system, beta, "
                                             "determinant, point, guichard")
      ->delimiter(',');

  auto* associate = app.add_subcommand("associate", "associated system of a Guichard net");
  auto* dualize = app.add_subcommand("dualize", "dual Guichard net");
  auto* backlund_cmd = app.add_subcommand("backlund", "Bianchi integration and Backlund transform");
  auto* decompose = app.add_subcommand("decompose", "Ribaucour transform induced by Bianchi's fbar, decomposed");
  auto* analyze = app.add_subcommand("analyze", "coordinate families: parallel, umbilic, cyclic, torsion");
  auto* export_cmd = app.add_subcommand("export", "OBJ slices or CSV fields");

  for (auto* sub : {verify, associate, dualize, backlund_cmd, decompose, analyze, export_cmd})
    grid_options(sub, cfg, lo, hi, base, config);
  for (auto* sub : {associate, dualize, backlund_cmd, export_cmd})
    sub->add_option("--c", cfg.c, "member of the associated family");
  for (auto* sub : {backlund_cmd, decompose, export_cmd}) {
    sub->add_option("--alpha", cfg.alpha, "alpha");
    sub->add_option("--lambda", cfg.lambda, "lambda");
    sub->add_option("--seed", seed, "gamma and gammabar at the base node")->delimiter(',')->expected(6);
  }
  backlund_cmd->add_flag("--permutability", cfg.permutability, "also transform the associated and dual systems");
  analyze->add_option("--axis", cfg.axis, "only this family");
  export_cmd->add_option("--axis", cfg.axis, "slice axis (default 2)");
  export_cmd->add_option("--slices", cfg.slices, "slice indices")->delimiter(',');
  export_cmd->add_option("--format", cfg.format, "obj or csv");
  export_cmd->add_option("--field", cfg.field, "csv field: H1, H2, H3, chi, x, y, z");
  export_cmd->add_option("--source", cfg.source, "seed, associated, dual or backlund");
  export_cmd->add_option("--export-dir", cfg.export_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  const auto* sub = app.get_subcommands().front();
  if (sub->get_name() == "list-charts") {
    json charts = json::array();
    for (const auto& m : list_charts()) charts.push_back(to_json(m));
    out << json{{"schema", kSchema}, {"charts", charts}}.dump(2) << "\n";
    return kPass;
  }

  try {
    if (!config.empty()) {
      std::ifstream is(config);
      if (!is) throw UsageError("cannot read " + config);
      json j;
      try {
        j = json::parse(is);
      } catch (const json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
      }
      if (!j.contains("operation")) j["operation"] = sub->get_name();
      if (j.at("operation") != sub->get_name()) throw UsageError("config operation does not match the subcommand");
      cfg = config_from_json(j);
    } else {
      cfg.operation = sub->get_name();
      if (!lo.empty()) cfg.lo = std::array<double, 3>{lo[0], lo[1], lo[2]};
      if (!hi.empty()) cfg.hi = std::array<double, 3>{hi[0], hi[1], hi[2]};
      if (!base.empty()) cfg.base = std::array<int, 3>{base[0], base[1], base[2]};
      if (!seed.empty()) std::copy(seed.begin(), seed.end(), cfg.seed.begin());
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return run(cfg, out, err);
}

}  // namespace orthonet::cli
