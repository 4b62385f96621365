#include "fasd/experiment.hpp"

#include "fasd/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

namespace fasd {

namespace {

constexpr int max_cells_per_side = 4096;

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

double parse_number(const std::string& key, const std::string& text)
{
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw std::invalid_argument(key + ": '" + text + "' is not a number");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text)
{
  const double v = parse_number(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw std::invalid_argument(key + ": '" + text + "' is not an integer");
  }
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text)
{
  if (text == "true" || text == "1" || text == "yes" || text == "on") {
    return true;
  }
  if (text == "false" || text == "0" || text == "no" || text == "off") {
    return false;
  }
  throw std::invalid_argument(key + ": '" + text + "' is not a boolean");
}

template <class T, class F>
T keyed(const std::string& key, const std::string& text, F parse)
{
  try {
    return parse(text);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(key + ": " + e.what());
  }
}

std::string format_h(int n)
{
  return "1/" + std::to_string(n);
}

std::string fmt(const char* f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body)
{
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        body(i);
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
}

std::map<std::string, std::string> read_config_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file '" + path + "'");
  }
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    out[key] = value;
  }
  return out;
}

} // namespace

int levels_for(int coarse_n, int n)
{
  if (coarse_n < 2) {
    throw std::invalid_argument("coarse grid needs at least 2 cells per side, got " +
                                std::to_string(coarse_n));
  }
  int levels = 1;
  int m = coarse_n;
  while (m < n) {
    m *= 2;
    ++levels;
  }
  if (m != n) {
    throw std::invalid_argument("h = " + format_h(n) + " is not reached by halving the coarse h = " +
                                format_h(coarse_n));
  }
  return levels;
}

int parse_mesh_size(const std::string& text)
{
  const std::string t = trim(text);
  if (t.rfind("1/", 0) == 0) {
    return parse_int("h", t.substr(2));
  }
  const double v = parse_number("h", t);
  if (v > 0.0 && v < 1.0) {
    const double n = std::round(1.0 / v);
    if (std::abs(n * v - 1.0) > 1e-9) {
      throw std::invalid_argument("h: '" + t + "' is not 1/n");
    }
    return static_cast<int>(n);
  }
  return parse_int("h", t);
}

void ExperimentSpec::validate() const
{
  if (p_values.empty() || eps2_values.empty() || n_values.empty() || variants.empty()) {
    throw std::invalid_argument("experiment grid has an empty list (p, eps2, h and variant all need values)");
  }
  for (int n : n_values) {
    if (n > max_cells_per_side) {
      throw std::invalid_argument("h = " + format_h(n) + " is finer than the limit 1/" +
                                  std::to_string(max_cells_per_side));
    }
    if (n < 1) {
      throw std::invalid_argument("h must be 1/n with n >= 1");
    }
    levels_for(coarse_n, n);
  }
  if (jobs < 0) {
    throw std::invalid_argument("jobs must be >= 0");
  }
}

std::size_t ExperimentSpec::cell_count() const
{
  return variants.size() * p_values.size() * eps2_values.size() * n_values.size();
}

SolverConfig make_config(Variant variant, const ConfigOverrides& o)
{
  SolverConfig c = SolverConfig::defaults(variant);
  if (o.step) {
    c.step = *o.step;
    c.unit_step_forced = *o.step == StepMode::Unit;
  }
  if (o.projection) c.projection = *o.projection;
  if (o.lipschitz) c.lipschitz = *o.lipschitz;
  if (o.local_energy) c.local_energy = *o.local_energy;
  if (o.decomposition) c.decomposition = *o.decomposition;
  if (o.sweep_order) c.sweep_order = *o.sweep_order;
  if (o.stopping_norm) c.stopping_norm = *o.stopping_norm;
  if (o.tol) c.outer_tol = *o.tol;
  if (o.max_iter) c.outer_max_iter = *o.max_iter;
  return c;
}

std::vector<GridRow> run_grid(const ExperimentSpec& spec)
{
  spec.validate();
  const int jobs = spec.jobs > 0 ? spec.jobs
                                 : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  struct Key {
    double p;
    double eps2;
    int n;
  };
  std::vector<Key> keys;
  for (double p : spec.p_values) {
    for (double e : spec.eps2_values) {
      for (int n : spec.n_values) {
        keys.push_back({p, e, n});
      }
    }
  }
  std::vector<std::unique_ptr<Problem>> problems(keys.size());
  std::vector<std::string> problem_errors(keys.size());
  parallel_for(keys.size(), jobs, [&](std::size_t k) {
    try {
      problems[k] = make_problem({keys[k].p, keys[k].eps2, spec.forcing}, spec.coarse_n,
                                 levels_for(spec.coarse_n, keys[k].n));
    } catch (const std::exception& e) {
      problem_errors[k] = e.what();
    }
  });

  std::vector<GridRow> rows(spec.variants.size() * keys.size());
  parallel_for(rows.size(), jobs, [&](std::size_t idx) {
    const Variant variant = spec.variants[idx / keys.size()];
    const std::size_t k = idx % keys.size();
    GridRow& row = rows[idx];
    row.variant = variant;
    row.p = keys[k].p;
    row.eps2 = keys[k].eps2;
    row.n = keys[k].n;
    auto take = [&](const IterationTrace& t) {
      row.iterations = t.iterations;
      row.rate = t.rate;
      row.final_residual = t.final_residual;
      row.seconds = t.wall_seconds;
      row.message = t.message;
      if (spec.emit_trace) {
        row.trace = t.records;
      }
    };
    if (!problems[k]) {
      row.status = "error";
      row.message = problem_errors[k];
      return;
    }
    try {
      const IterationTrace t = solve(*problems[k], make_config(variant, spec.overrides));
      take(t);
      row.status = to_string(t.status);
    } catch (const DivergenceError& e) {
      take(e.trace());
      row.status = "diverged";
      row.message = e.what();
    } catch (const std::exception& e) {
      row.status = "error";
      row.message = e.what();
    }
  });
  return rows;
}

void write_csv(std::ostream& os, const std::vector<GridRow>& rows, bool deterministic)
{
  os << "variant,p,eps2,h,iterations,rate,final_residual,status,seconds\n";
  for (const auto& r : rows) {
    os << to_string(r.variant) << ',' << fmt("%.10g", r.p) << ',' << fmt("%.10g", r.eps2) << ','
       << format_h(r.n) << ',' << r.iterations << ',' << fmt("%.6f", r.rate) << ','
       << fmt("%.6e", r.final_residual) << ',' << r.status << ','
       << fmt("%.6f", deterministic ? 0.0 : r.seconds) << '\n';
  }
}

void write_trace_csv(std::ostream& os, const std::vector<GridRow>& rows, bool deterministic)
{
  os << "variant,p,eps2,h,iteration,energy,residual,decrease,seconds\n";
  for (const auto& r : rows) {
    for (const auto& rec : r.trace) {
      os << to_string(r.variant) << ',' << fmt("%.10g", r.p) << ',' << fmt("%.10g", r.eps2) << ','
         << format_h(r.n) << ',' << rec.iteration << ',' << fmt("%.17g", rec.energy) << ','
         << fmt("%.6e", rec.residual) << ',' << fmt("%.6e", rec.decrease) << ','
         << fmt("%.6f", deterministic ? 0.0 : rec.seconds) << '\n';
    }
  }
}

void write_json(std::ostream& os, const std::vector<GridRow>& rows, bool with_trace,
                bool deterministic)
{
  auto number = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["variant"] = to_string(r.variant);
    j["p"] = r.p;
    j["eps2"] = r.eps2;
    j["h"] = format_h(r.n);
    j["iterations"] = r.iterations;
    j["rate"] = number(r.rate);
    j["final_residual"] = number(r.final_residual);
    j["status"] = r.status;
    j["seconds"] = deterministic ? 0.0 : r.seconds;
    if (!r.message.empty()) {
      j["message"] = r.message;
    }
    if (with_trace) {
      nlohmann::json trace = nlohmann::json::array();
      for (const auto& rec : r.trace) {
        trace.push_back({{"iteration", rec.iteration},
                         {"energy", number(rec.energy)},
                         {"residual", number(rec.residual)},
                         {"decrease", number(rec.decrease)},
                         {"correction_normsq", number(rec.correction_normsq)},
                         {"seconds", deterministic ? 0.0 : rec.seconds}});
      }
      j["trace"] = std::move(trace);
    }
    out.push_back(std::move(j));
  }
  os << out.dump(2) << '\n';
}

void write_table(std::ostream& os, const std::vector<GridRow>& rows)
{
  std::vector<Variant> variants;
  std::vector<int> ns;
  std::vector<double> ps;
  std::vector<double> eps;
  auto add = [](auto& v, auto x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) {
      v.push_back(x);
    }
  };
  for (const auto& r : rows) {
    add(variants, r.variant);
    add(ns, r.n);
    add(ps, r.p);
    add(eps, r.eps2);
  }
  for (Variant v : variants) {
    for (int n : ns) {
      os << to_string(v) << ", h = " << format_h(n) << '\n';
      os << "p       ";
      for (double e : eps) {
        os << fmt(" | eps2=%-11g", e);
      }
      os << '\n';
      for (double p : ps) {
        os << fmt("%-8g", p);
        for (double e : eps) {
          std::string cell = "?";
          for (const auto& r : rows) {
            if (r.variant == v && r.n == n && r.p == p && r.eps2 == e) {
              cell = r.status == "converged"
                         ? std::to_string(r.iterations) + fmt(" (%.3f)", r.rate)
                         : (r.status == "error" ? "error" : "-");
            }
          }
          char buf[64];
          std::snprintf(buf, sizeof buf, " | %-16s", cell.c_str());
          os << buf;
        }
        os << '\n';
      }
      os << '\n';
    }
  }
}

std::optional<ExperimentSpec> parse_config(const std::vector<std::string>& args)
{
  CLI::App app{"Multilevel subspace correction solvers for the p-power model energy"};
  app.set_help_flag("--help", "Print this help message and exit");

  const std::vector<std::string> keys = {
      "p", "eps2", "h", "coarse-h", "variant", "step", "projection", "lipschitz", "local-energy",
      "decomposition", "sweep-order", "dual-norm", "tol", "max-iter", "forcing", "out", "format",
      "trace", "deterministic", "jobs", "dump-mesh"};
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> opts;
  auto text = [&](const std::string& key, const std::string& help) {
    opts[key] = app.add_option("--" + key, flags[key], help);
  };
  text("p", "exponents, comma separated (default 4)");
  text("eps2", "values of eps^2, comma separated (default 1)");
  text("h", "finest mesh sizes as n, 1/n or a decimal, comma separated (default 64)");
  text("coarse-h", "cells per side of the coarsest grid (default 4)");
  text("variant", "sso | fasd | fasd-als | fas | fasq1 | fasq2, comma separated (default fas)");
  text("step", "exact | quadratic | unit");
  text("projection", "injection | l2");
  text("lipschitz", "local | global");
  text("local-energy", "restricted | quadratic_identity | quadratic_hessian | quadratic_scaled");
  text("decomposition", "multilevel_nodal | level_spaces | finest_nodal");
  text("sweep-order", "symmetric | fine_to_coarse | coarse_to_fine");
  text("dual-norm", "stopping norm: stiffness | euclidean");
  text("tol", "outer tolerance on the dual gradient norm (default 1e-10)");
  text("max-iter", "outer iteration limit (default 200)");
  text("forcing", "one | sinsin | zero (default one)");
  text("out", "output file (default standard output)");
  text("format", "csv | json (default csv)");
  text("jobs", "concurrent grid cells (default: hardware threads)");
  text("dump-mesh", "write the finest mesh of the first h to this file");
  bool trace_flag = false;
  bool det_flag = false;
  opts["trace"] = app.add_flag("--trace", trace_flag, "also emit per-iteration traces");
  opts["deterministic"] =
      app.add_flag("--deterministic", det_flag, "write 0 for timings so runs compare byte for byte");
  std::string config_path;
  app.add_option("--config", config_path, "key=value file; command-line flags take precedence");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(e.what());
  }

  std::map<std::string, std::string> file;
  if (!config_path.empty()) {
    file = read_config_file(config_path);
    for (const auto& [key, value] : file) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw std::invalid_argument("unknown key '" + key + "' in " + config_path);
      }
    }
  }
  auto lookup = [&](const std::string& key) -> std::optional<std::string> {
    if (opts[key]->count() > 0) {
      if (key == "trace") return std::string(trace_flag ? "true" : "false");
      if (key == "deterministic") return std::string(det_flag ? "true" : "false");
      return flags[key];
    }
    if (auto it = file.find(key); it != file.end()) {
      return it->second;
    }
    return std::nullopt;
  };

  ExperimentSpec spec;
  auto list = [&](const std::string& key, const std::string& fallback) {
    return split_list(lookup(key).value_or(fallback));
  };
  for (const auto& s : list("p", "4")) spec.p_values.push_back(parse_number("p", s));
  for (const auto& s : list("eps2", "1")) spec.eps2_values.push_back(parse_number("eps2", s));
  for (const auto& s : list("h", "64")) spec.n_values.push_back(keyed<int>("h", s, parse_mesh_size));
  for (const auto& s : list("variant", "fas")) spec.variants.push_back(keyed<Variant>("variant", s, parse_variant));
  if (auto v = lookup("coarse-h")) spec.coarse_n = keyed<int>("coarse-h", *v, parse_mesh_size);
  auto& o = spec.overrides;
  if (auto v = lookup("step")) o.step = keyed<StepMode>("step", *v, parse_step_mode);
  if (auto v = lookup("projection")) o.projection = keyed<ProjectionMode>("projection", *v, parse_projection);
  if (auto v = lookup("lipschitz")) o.lipschitz = keyed<LipschitzMode>("lipschitz", *v, parse_lipschitz_mode);
  if (auto v = lookup("local-energy")) o.local_energy = keyed<LocalEnergy>("local-energy", *v, parse_local_energy);
  if (auto v = lookup("decomposition")) o.decomposition = keyed<Decomposition>("decomposition", *v, parse_decomposition);
  if (auto v = lookup("sweep-order")) o.sweep_order = keyed<SweepOrder>("sweep-order", *v, parse_sweep_order);
  if (auto v = lookup("dual-norm")) o.stopping_norm = keyed<DualNormKind>("dual-norm", *v, parse_dual_norm);
  if (auto v = lookup("tol")) o.tol = parse_number("tol", *v);
  if (auto v = lookup("max-iter")) o.max_iter = parse_int("max-iter", *v);
  if (auto v = lookup("forcing")) spec.forcing = keyed<Forcing>("forcing", *v, parse_forcing);
  if (auto v = lookup("out")) spec.out_path = *v;
  if (auto v = lookup("format")) {
    if (*v == "csv") {
      spec.format = OutputFormat::Csv;
    } else if (*v == "json") {
      spec.format = OutputFormat::Json;
    } else {
      throw std::invalid_argument("format: '" + *v + "' (csv | json)");
    }
  }
  if (auto v = lookup("trace")) spec.emit_trace = parse_bool("trace", *v);
  if (auto v = lookup("deterministic")) spec.deterministic = parse_bool("deterministic", *v);
  if (auto v = lookup("jobs")) spec.jobs = parse_int("jobs", *v);
  if (auto v = lookup("dump-mesh")) spec.dump_mesh_path = *v;
  spec.validate();
  for (Variant v : spec.variants) {
    make_config(v, spec.overrides).validate();
  }
  return spec;
}

int run_cli(const std::vector<std::string>& args)
{
  std::optional<ExperimentSpec> spec;
  try {
    spec = parse_config(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  if (!spec) {
    return 0;
  }

  if (!spec->dump_mesh_path.empty()) {
    std::ofstream mesh_out(spec->dump_mesh_path);
    if (!mesh_out) {
      std::cerr << "error: cannot write " << spec->dump_mesh_path << '\n';
      return 2;
    }
    const int n = spec->n_values.front();
    write_mesh(mesh_out, build_hierarchy(spec->coarse_n, levels_for(spec->coarse_n, n)).back());
  }

  const std::vector<GridRow> rows = run_grid(*spec);

  std::ofstream file;
  if (!spec->out_path.empty()) {
    file.open(spec->out_path);
    if (!file) {
      std::cerr << "error: cannot write " << spec->out_path << '\n';
      return 2;
    }
  }
  std::ostream& os = spec->out_path.empty() ? std::cout : file;
  if (spec->format == OutputFormat::Json) {
    write_json(os, rows, spec->emit_trace, spec->deterministic);
  } else {
    write_csv(os, rows, spec->deterministic);
    if (spec->emit_trace) {
      if (spec->out_path.empty()) {
        os << '\n';
        write_trace_csv(os, rows, spec->deterministic);
      } else {
        std::ofstream trace_file(spec->out_path + ".trace.csv");
        write_trace_csv(trace_file, rows, spec->deterministic);
      }
    }
  }
  if (!spec->out_path.empty()) {
    write_table(std::cout, rows);
  }

  bool ok = true;
  for (const auto& r : rows) {
    if (r.status == "error") {
      std::cerr << to_string(r.variant) << " p=" << r.p << " eps2=" << r.eps2 << " h="
                << format_h(r.n) << ": " << r.message << '\n';
      ok = false;
    }
  }
  return ok ? 0 : 1;
}

} // namespace fasd
