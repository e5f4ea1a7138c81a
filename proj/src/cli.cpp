#include "rogue/cli.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace rogue::cli {

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t end = text.find(sep, start);
    parts.emplace_back(text.substr(start, end == std::string_view::npos ? end : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

double parse_double(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    double d = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(d)) throw std::invalid_argument(text);
    return d;
  } catch (const std::exception&) {
    throw UsageError(std::string("bad number for ") + what + ": '" + text + "'");
  }
}

std::pair<double, double> parse_range(const std::string& text) {
  auto parts = split(text, ':');
  if (parts.size() != 2) throw UsageError("range must look like a:b, got '" + text + "'");
  return {parse_double(parts[0], "range"), parse_double(parts[1], "range")};
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& text) {
  auto parts = split(text, 'x');
  if (parts.size() != 2) throw UsageError("grid must look like NxM, got '" + text + "'");
  auto count = [&](const std::string& s) {
    double d = parse_double(s, "grid");
    if (d < 2 || d != std::floor(d) || d > 1e5) throw UsageError("grid counts must be integers >= 2");
    return std::size_t(d);
  };
  return {count(parts[0]), count(parts[1])};
}

template <class Value, class Parse>
std::map<std::string, Value> parse_assignments(const std::string& text, Parse parse) {
  std::map<std::string, Value> out;
  if (text.empty()) return out;
  for (const auto& item : split(text, ',')) {
    auto kv = split(item, '=');
    if (kv.size() != 2 || kv[0].empty()) throw UsageError("expected name=value, got '" + item + "'");
    out[kv[0]] = parse(kv[1]);
  }
  return out;
}

Params resolve_params(const RunConfig& c) { return c.params_path.empty() ? Params{} : load_params(c.params_path); }

FreeValues resolve_free(const RunConfig& c) {
  FreeValues free = parse_assignments<Rational>(c.free, [](const std::string& s) { return parse_rational(s); });
  if (free.empty()) free = default_free_values(c.order);
  for (const auto& [name, value] : free) {
    auto allowed = ansatz_free_params(c.order);
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      throw UsageError("'" + name + "' is not a free parameter at order " + std::to_string(c.order));
    }
  }
  return free;
}

AnsatzForm resolve_form(const RunConfig& c) {
  if (c.form == "corrected") return AnsatzForm::corrected;
  if (c.form == "printed") return AnsatzForm::as_printed;
  throw UsageError("form must be 'corrected' or 'printed'");
}

void check_order(const RunConfig& c) {
  if (c.order < 1 || c.order > 3) throw UsageError("order must be 1, 2 or 3");
}

FieldOptions field_options(const RunConfig& c) {
  FieldOptions fo;
  fo.free_values = resolve_free(c);
  fo.form = resolve_form(c);
  fo.override_singular = c.override_singular;
  return fo;
}

void emit(const RunConfig& c, std::ostream& out, const std::string& text) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw UsageError("cannot write " + c.out);
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json header(const RunConfig& c, const Params& p) {
  Json j;
  j["config"] = config_json(c);
  j["order"] = c.order;
  j["params"] = params_json(p);
  return j;
}

// ---------------------------------------------------------------------------

int cmd_derive(const RunConfig& c, std::ostream& out) {
  Params p = resolve_params(c);
  DeriveOptions opt;
  opt.free_values = resolve_free(c);
  opt.seed = c.seed;
  opt.perturbation = c.perturb;
  Json j = header(c, p);
  Json d = derivation_report(c.order, p, opt);
  for (auto& [k, v] : d.items()) j[k] = v;
  emit(c, out, dump(j));
  return j["verification"]["pass"].get<bool>() ? kOk : kVerificationFailed;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  Params p = resolve_params(c);
  p.validate();
  AnsatzOptions ao;
  ao.form = resolve_form(c);
  AnsatzSpec spec = build_xi(c.order, AnsatzMode::unknown, p, {}, ao);
  Solution sol = closed_form_coefficients(c.order, p, {}, true);
  VerificationReport ver = verify_solution(spec, p, sol);
  Json j = header(c, p);
  j["form"] = c.form;
  j["status"] = ver.pass ? "identically zero" : "nonzero";
  j["verification"] = verification_json(ver);
  emit(c, out, dump(j));
  return ver.pass ? kOk : kVerificationFailed;
}

double max_relative_error(const std::map<std::string, double>& got, const std::map<std::string, double>& want,
                          const std::vector<std::string>& skip) {
  double worst = 0;
  for (const auto& [name, value] : want) {
    if (std::find(skip.begin(), skip.end(), name) != skip.end()) continue;
    auto it = got.find(name);
    if (it == got.end()) continue;
    worst = std::max(worst, std::fabs(it->second - value) / std::max(std::fabs(value), 1e-300));
  }
  return worst;
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
  Params p = resolve_params(c);
  p.validate();
  FreeValues free = resolve_free(c);
  SolveOptions opt;
  opt.max_iter = c.max_iter;
  opt.tol = c.tol > 0 ? c.tol : (c.order == 3 ? 1e-10 : 1e-12);
  auto reference = closed_form_values(c.order, p, free);
  Json j = header(c, p);
  j["tolerance"] = opt.tol;
  Json ref;
  for (const auto& [k, v] : reference) ref[k] = v;
  j["reference"] = ref;

  std::mt19937_64 rng(c.seed);
  std::map<std::string, double> start;
  if (!c.start.empty()) {
    start = parse_assignments<double>(c.start, [](const std::string& s) { return parse_double(s, "start"); });
  } else if (c.order == 1) {
    start = {{"z0", 1.0}, {"z1", 1.0}};
  } else {
    start = perturbed_seed(c.order, p, free, c.perturb, rng);
  }

  SolveResult result;
  if (c.order <= 2) {
    CoeffSystem sys = build_numeric_system(c.order, p, free);
    j["method"] = "coefficient system";
    j["equations"] = sys.equations.size();
    result = solve_numeric(sys, start, opt);
    if (c.order == 1 && c.starts > 0) {
      std::uniform_real_distribution<double> coord(-10, 10);
      Json runs = Json::array();
      for (int i = 0; i < c.starts; ++i) {
        std::map<std::string, double> s = {{"z0", coord(rng)}, {"z1", coord(rng)}};
        SolveResult r = solve_numeric(sys, s, opt);
        Json rj = solve_json(r);
        rj["max_relative_error"] = max_relative_error(r.assignment, reference, {});
        runs.push_back(std::move(rj));
      }
      j["multi_start"] = std::move(runs);
    }
  } else {
    SampledSystem sys = build_sampled_system(c.order, p, free, c.samples, c.seed);
    j["method"] = "sampled reduced equation";
    j["equations"] = sys.num_equations();
    result = solve_sampled(sys, start, opt);
  }
  j["result"] = solve_json(result);
  j["max_relative_error"] = max_relative_error(result.assignment, reference, result.unconstrained);
  emit(c, out, dump(j));
  return result.converged ? kOk : kNotConverged;
}

GridField sample_from_config(const RunConfig& c, const WaveModel& model) {
  auto [nx, ny] = parse_grid(c.grid);
  auto [x0, x1] = parse_range(c.xrange);
  auto [y0, y1] = parse_range(c.yrange);
  return sample_grid(model, {x0, x1, nx}, {y0, y1, ny}, c.t);
}

int cmd_field(const RunConfig& c, std::ostream& out) {
  Params p = resolve_params(c);
  WaveModel model(c.order, p, field_options(c));
  GridField f = sample_from_config(c, model);
  std::ostringstream s;
  write_csv(s, f);
  emit(c, out, s.str());
  return kOk;
}

int cmd_extrema(const RunConfig& c, std::ostream& out) {
  Params p = resolve_params(c);
  WaveModel model(c.order, p, field_options(c));
  GridField f = sample_from_config(c, model);
  ExtremaOptions eo;
  eo.threshold_fraction = c.threshold;
  eo.min_separation = c.min_separation;
  eo.refine = !c.no_refine;
  Json j = header(c, p);
  Json e = extrema_json(find_extrema(f, &model, eo));
  for (auto& [k, v] : e.items()) j[k] = v;
  emit(c, out, dump(j));
  return kOk;
}

int cmd_fdcheck(const RunConfig& c, std::ostream& out) {
  Params p = resolve_params(c);
  WaveModel model(c.order, p, field_options(c));
  std::vector<double> steps;
  for (const auto& s : split(c.steps, ',')) {
    double h = parse_double(s, "step");
    if (!(h > 0)) throw UsageError("steps must be positive");
    steps.push_back(h);
  }
  std::vector<std::array<double, 3>> points;
  if (!c.points.empty()) {
    for (const auto& item : split(c.points, ';')) {
      auto xyz = split(item, ',');
      if (xyz.size() != 3) throw UsageError("points look like x,y,t;x,y,t");
      points.push_back({parse_double(xyz[0], "point"), parse_double(xyz[1], "point"), parse_double(xyz[2], "point")});
    }
  }
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> coord(-3, 3);
  for (int i = 0; i < c.random_points; ++i) points.push_back({coord(rng), coord(rng), 0.0});
  if (points.empty()) points.push_back({0.5, 0.5, 0.0});

  Json j = header(c, p);
  Json rows = Json::array();
  for (const auto& pt : points) {
    Json table = Json::array();
    double previous = 0;
    for (double h : steps) {
      FdResidual r = fd_residual(model, pt[0], pt[1], pt[2], h);
      Json row = {{"h", h}, {"residual", r.residual}, {"scale", r.scale}, {"floor", r.floor}};
      if (previous != 0) row["ratio"] = std::fabs(previous / r.residual);
      previous = r.residual;
      table.push_back(std::move(row));
    }
    rows.push_back({{"x", pt[0]}, {"y", pt[1]}, {"t", pt[2]}, {"table", std::move(table)}});
  }
  j["points"] = std::move(rows);
  emit(c, out, dump(j));
  return kOk;
}

}  // namespace

Json config_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["params_path"] = c.params_path;
  j["order"] = c.order;
  j["free"] = c.free;
  j["form"] = c.form;
  j["override_singular"] = c.override_singular;
  j["threads"] = c.threads;
  if (c.command == "field" || c.command == "extrema") {
    j["grid"] = c.grid;
    j["xrange"] = c.xrange;
    j["yrange"] = c.yrange;
    j["t"] = c.t;
  }
  if (c.command == "extrema") {
    j["threshold"] = c.threshold;
    j["min_separation"] = c.min_separation;
    j["refine"] = !c.no_refine;
  }
  if (c.command == "solve" || c.command == "derive") {
    j["seed"] = c.seed;
    j["perturb"] = c.perturb;
  }
  if (c.command == "solve") {
    j["start"] = c.start;
    j["starts"] = c.starts;
    j["samples"] = c.samples;
    j["tol"] = c.tol;
    j["max_iter"] = c.max_iter;
  }
  if (c.command == "fdcheck") {
    j["points"] = c.points;
    j["random_points"] = c.random_points;
    j["seed"] = c.seed;
    j["steps"] = c.steps;
  }
  return j;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    check_order(c);
    if (c.threads > 0) omp_set_num_threads(c.threads);
    if (c.command == "derive") return cmd_derive(c, out);
    if (c.command == "verify") return cmd_verify(c, out);
    if (c.command == "solve") return cmd_solve(c, out);
    if (c.command == "field") return cmd_field(c, out);
    if (c.command == "extrema") return cmd_extrema(c, out);
    if (c.command == "fdcheck") return cmd_fdcheck(c, out);
    throw UsageError("unknown command '" + c.command + "'");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SingularParameters& e) {
    err << "singular parameters: " << e.what() << "\n";
    return kSingular;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Exact rogue-wave derivation, verification and field sampling"};
  app.require_subcommand(1);
  RunConfig c;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--params", c.params_path, "Parameter JSON file");
    sub->add_option("--order", c.order, "Ansatz order (1, 2 or 3)");
    sub->add_option("--free", c.free, "Free parameters, e.g. z21=1,z24=1");
    sub->add_option("--form", c.form, "Ansatz text: corrected or printed");
    sub->add_flag("--override-singular", c.override_singular, "Allow parameters outside beta*(gamma+omega^2) < 0");
    sub->add_option("--threads", c.threads, "Cap on OpenMP threads");
    sub->add_option("--out", c.out, "Output file (default stdout)");
  };
  auto grid = [&](CLI::App* sub) {
    sub->add_option("--grid", c.grid, "Nodes as NxM");
    sub->add_option("--xrange", c.xrange, "x range a:b");
    sub->add_option("--yrange", c.yrange, "y range a:b");
    sub->add_option("--t", c.t, "Time");
  };

  auto* derive = app.add_subcommand("derive", "Derivation report");
  common(derive);
  derive->add_option("--seed", c.seed, "Seed for the perturbed start");
  derive->add_option("--perturb", c.perturb, "Relative start perturbation");
  auto* verify = app.add_subcommand("verify", "Exact check of the closed-form coefficients");
  common(verify);
  auto* solve = app.add_subcommand("solve", "Numeric recovery of the coefficients");
  common(solve);
  solve->add_option("--seed", c.seed, "RNG seed");
  solve->add_option("--start", c.start, "Start point, e.g. z0=1,z1=1");
  solve->add_option("--starts", c.starts, "Order 1: extra random starts in [-10,10]^2");
  solve->add_option("--perturb", c.perturb, "Relative perturbation of the default start");
  solve->add_option("--samples", c.samples, "Order 3: sample points");
  solve->add_option("--tol", c.tol, "Residual tolerance");
  solve->add_option("--max-iter", c.max_iter, "Iteration cap");
  auto* field = app.add_subcommand("field", "Sample u on a grid as CSV");
  common(field);
  grid(field);
  auto* extrema = app.add_subcommand("extrema", "Locate extrema of u");
  common(extrema);
  grid(extrema);
  extrema->add_option("--threshold", c.threshold, "Fraction of max |u| to keep");
  extrema->add_option("--min-separation", c.min_separation, "Same-kind merge distance");
  extrema->add_flag("--no-refine", c.no_refine, "Skip Newton refinement");
  auto* fdcheck = app.add_subcommand("fdcheck", "Finite-difference residual of the full equation");
  fdcheck->set_help_flag("--help", "Print this help message and exit");
  common(fdcheck);
  fdcheck->add_option("--points", c.points, "x,y,t;x,y,t");
  fdcheck->add_option("--random", c.random_points, "Random points in [-3,3]^2 at t=0");
  fdcheck->add_option("--seed", c.seed, "RNG seed");
  fdcheck->add_option("--h", c.steps, "Step sizes, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  c.command = app.get_subcommands().front()->get_name();
  return run(c, std::cout, std::cerr);
}

}  // namespace rogue::cli
