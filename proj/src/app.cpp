#include "lorentz/app.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "lorentz/csv.hpp"
#include "lorentz/error.hpp"
#include "lorentz/estimators.hpp"
#include "lorentz/table_io.hpp"
#include "lorentz/walkers.hpp"

#ifndef LORENTZ_LAB_VERSION
#define LORENTZ_LAB_VERSION "0.0.0"
#endif

namespace lorentz::app {

using nlohmann::json;
namespace fs = std::filesystem;

HorizonMode parse_mode(std::string_view text) {
  if (text == "strict") return HorizonMode::strict;
  if (text == "permissive") return HorizonMode::permissive;
  throw ConfigError("unknown mode '" + std::string(text) + "' (strict|permissive)");
}

std::string_view to_string(HorizonMode mode) {
  return mode == HorizonMode::strict ? "strict" : "permissive";
}

namespace {

template <class T>
T get_number(const json& v, const char* key) {
  if (!v.is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<std::int64_t>() < 0)) {
      throw ConfigError(std::string("config: '") + key + "' must be a non-negative integer");
    }
    return v.get<T>();
  } else {
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(std::string("config: '") + key + "' is not finite");
    return x;
  }
}

std::vector<std::uint64_t> get_list(const json& v, const char* key) {
  if (!v.is_array()) throw ConfigError(std::string("config: '") + key + "' must be an array");
  std::vector<std::uint64_t> out;
  for (const auto& x : v) out.push_back(get_number<std::uint64_t>(x, key));
  return out;
}

std::string get_string(const json& v, const char* key) {
  if (!v.is_string()) throw ConfigError(std::string("config: '") + key + "' must be a string");
  return v.get<std::string>();
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const char* where) {
  if (!obj.is_object()) throw ConfigError(std::string("config: '") + where + "' must be an object");
  for (const auto& [k, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("config: unknown key '" + k + "' in " + where);
  }
}

JMethod parse_j_method(std::string_view s) {
  if (s == "cubature") return JMethod::cubature;
  if (s == "monte-carlo") return JMethod::monte_carlo;
  throw ConfigError("unknown J method '" + std::string(s) + "' (cubature|monte-carlo)");
}

std::string_view j_method_name(JMethod m) {
  return m == JMethod::cubature ? "cubature" : "monte-carlo";
}

std::ofstream open_out(const RunConfig& cfg, const char* name) {
  fs::create_directories(cfg.out);
  std::ofstream f(cfg.out / name, std::ios::binary);
  if (!f) throw Error("cannot write " + (cfg.out / name).string());
  return f;
}

void write_json(const RunConfig& cfg, const char* name, const json& doc) {
  auto f = open_out(cfg, name);
  f << doc.dump(2) << '\n';
}

json manifest_base(const RunConfig& cfg, std::string_view command) {
  return {{"command", command},
          {"version", version()},
          {"seed", cfg.seed},
          {"mode", to_string(cfg.mode)},
          {"init", to_string(cfg.init)}};
}

json table_block(const BilliardTable& t) {
  const auto& h = t.horizon();
  json j = {{"digest", t.digest()}, {"spec", table_to_json(t)}, {"finite_horizon", h.finite}};
  if (h.max_free_path_bound) j["max_free_path_bound"] = *h.max_free_path_bound;
  return j;
}

json sym_json(const Sym2& s) { return json::array({s.xx, s.xy, s.yy}); }

void write_sigma2_row(std::ostream& f, const DiffusionMatrix& d) {
  f << to_string(d.method) << ',' << format_double(d.sigma2.xx) << ','
    << format_double(d.sigma2.xy) << ',' << format_double(d.sigma2.yy) << ','
    << format_double(d.stderr_.xx) << ',' << format_double(d.stderr_.xy) << ','
    << format_double(d.stderr_.yy) << ',' << format_double(d.sqrt_det) << ','
    << format_double(d.sqrt_det_stderr()) << '\n';
}

template <SiteSource Source>
void run_estimate(const RunConfig& cfg, const Source& source, std::string_view command,
                  json table) {
  EnsembleConfig ec;
  ec.trajectories = cfg.trajectories;
  ec.n_max = cfg.n_max;
  ec.checkpoints = resolve_checkpoints(cfg);
  ec.seed = cfg.seed;
  ec.workers = cfg.workers;
  const auto run = run_ensemble(source, ec);
  const auto& s = run.summary;

  const auto ks = resolve_return_ks(cfg);
  const std::size_t mr = cfg.return_trajectories ? cfg.return_trajectories : cfg.trajectories;
  const auto curve = return_probability(source, ks, mr, cfg.seed, cfg.workers);

  json notes = json::array();
  std::vector<DiffusionMatrix> sigma;
  if (cfg.trajectories >= 100) {
    const std::size_t m = cfg.trajectories;
    const std::size_t last = ec.checkpoints.size() - 1;
    sigma.push_back(estimate_sigma2_empirical(
        std::span(run.displacement).subspan(last * m, m), ec.checkpoints[last]));
  }
  try {
    sigma.push_back(
        estimate_sigma2_greenkubo(source, cfg.gk_burn_in, cfg.gk_lag, cfg.gk_steps, cfg.seed));
  } catch (const Error& e) {
    notes.push_back(std::string("green-kubo skipped: ") + e.what());
  }

  {
    auto f = open_out(cfg, "ensemble.csv");
    f << "n,mean_V,var_V,stderr_mean,stderr_var\n";
    for (std::size_t c = 0; c < s.checkpoints.size(); ++c) {
      f << s.checkpoints[c] << ',' << format_double(s.mean_v[c]) << ','
        << format_double(s.var_v[c]) << ',' << format_double(s.stderr_mean[c]) << ','
        << format_double(s.stderr_var[c]) << '\n';
    }
  }
  {
    auto f = open_out(cfg, "returns.csv");
    f << "k,p_hat,ci\n";
    for (std::size_t i = 0; i < curve.ks.size(); ++i) {
      f << curve.ks[i] << ',' << format_double(curve.p_hat[i]) << ','
        << format_double(curve.ci_halfwidth[i]) << '\n';
    }
  }
  {
    auto f = open_out(cfg, "sigma2.csv");
    f << "method,xx,xy,yy,stderr_xx,stderr_xy,stderr_yy,sqrt_det,sqrt_det_stderr\n";
    for (const auto& d : sigma) write_sigma2_row(f, d);
  }

  json m = manifest_base(cfg, command);
  m["trajectories"] = cfg.trajectories;
  m["n_max"] = cfg.n_max;
  m["checkpoints"] = ec.checkpoints;
  m["source_digest"] = s.source_digest;
  m["table"] = std::move(table);
  m["returns"] = {{"trajectories", mr}, {"ks", ks}};
  m["green_kubo"] = {{"burn_in", cfg.gk_burn_in}, {"lag_cutoff", cfg.gk_lag},
                     {"steps", cfg.gk_steps}};
  for (const auto& d : sigma) {
    if (!d.note.empty()) notes.push_back(d.note);
  }
  try {
    const auto fit = fit_constants(s);
    m["fit"] = {{"c0_hat", fit.c0_hat}, {"c0_band", fit.c0_band}, {"c_hat", fit.c_hat},
                {"c_band", fit.c_band}, {"var_ratio", fit.var_ratio},
                {"monotone_drift", fit.monotone_drift}};
  } catch (const InsufficientData& e) {
    notes.push_back(std::string("no constant fit: ") + e.what());
  }
  m["notes"] = notes;
  write_json(cfg, "manifest.json", m);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

std::string version() { return LORENTZ_LAB_VERSION; }

RunConfig config_from_json(const json& doc, const fs::path& base_dir) {
  check_keys(doc,
             {"table", "mode", "init", "trajectories", "n_max", "checkpoints", "seed", "workers",
              "out", "returns", "green_kubo", "steps", "constants"},
             "config");
  RunConfig c;
  if (doc.contains("table")) {
    const auto& t = doc["table"];
    if (t.is_string()) {
      fs::path p = t.get<std::string>();
      c.table_file = p.is_absolute() ? p : base_dir / p;
    } else {
      c.table = t;
    }
  }
  if (doc.contains("mode")) c.mode = parse_mode(get_string(doc["mode"], "mode"));
  if (doc.contains("init")) c.init = parse_init_mode(get_string(doc["init"], "init"));
  if (doc.contains("trajectories"))
    c.trajectories = get_number<std::size_t>(doc["trajectories"], "trajectories");
  if (doc.contains("n_max")) c.n_max = get_number<std::uint64_t>(doc["n_max"], "n_max");
  if (doc.contains("checkpoints")) c.checkpoints = get_list(doc["checkpoints"], "checkpoints");
  if (doc.contains("seed")) c.seed = get_number<std::uint64_t>(doc["seed"], "seed");
  if (doc.contains("workers")) c.workers = get_number<unsigned>(doc["workers"], "workers");
  if (doc.contains("out")) {
    fs::path p = get_string(doc["out"], "out");
    c.out = p.is_absolute() ? p : base_dir / p;
  }
  if (doc.contains("returns")) {
    const auto& r = doc["returns"];
    check_keys(r, {"trajectories", "ks"}, "returns");
    if (r.contains("trajectories"))
      c.return_trajectories = get_number<std::size_t>(r["trajectories"], "returns.trajectories");
    if (r.contains("ks")) c.return_ks = get_list(r["ks"], "returns.ks");
  }
  if (doc.contains("green_kubo")) {
    const auto& g = doc["green_kubo"];
    check_keys(g, {"burn_in", "lag_cutoff", "steps"}, "green_kubo");
    if (g.contains("burn_in")) c.gk_burn_in = get_number<std::uint64_t>(g["burn_in"], "burn_in");
    if (g.contains("lag_cutoff")) c.gk_lag = get_number<std::size_t>(g["lag_cutoff"], "lag_cutoff");
    if (g.contains("steps")) c.gk_steps = get_number<std::uint64_t>(g["steps"], "steps");
  }
  if (doc.contains("steps")) c.steps = get_number<std::uint64_t>(doc["steps"], "steps");
  if (doc.contains("constants")) {
    const auto& k = doc["constants"];
    check_keys(k, {"sigma2_file", "sigma2", "j_method", "j_target_err"}, "constants");
    if (k.contains("sigma2_file")) {
      fs::path p = get_string(k["sigma2_file"], "sigma2_file");
      c.sigma2_file = p.is_absolute() ? p : base_dir / p;
    }
    if (k.contains("sigma2")) {
      const auto& s = k["sigma2"];
      if (!s.is_array() || s.size() != 3) throw ConfigError("config: sigma2 must be [xx, xy, yy]");
      c.sigma2_entries = std::array<double, 3>{get_number<double>(s[0], "sigma2"),
                                               get_number<double>(s[1], "sigma2"),
                                               get_number<double>(s[2], "sigma2")};
    }
    if (k.contains("j_method")) c.j_method = parse_j_method(get_string(k["j_method"], "j_method"));
    if (k.contains("j_target_err"))
      c.j_target_err = get_number<double>(k["j_target_err"], "j_target_err");
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

BilliardTable resolve_table(const RunConfig& cfg) {
  if (cfg.table) return table_from_json(*cfg.table);
  if (cfg.table_file) return read_table(*cfg.table_file);
  return default_table();
}

std::vector<std::uint64_t> resolve_checkpoints(const RunConfig& cfg) {
  if (!cfg.checkpoints.empty()) return cfg.checkpoints;
  if (cfg.n_max == 0) throw ConfigError("n_max must be >= 1");
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 16; n < cfg.n_max; n *= 2) out.push_back(n);
  out.push_back(cfg.n_max);
  return out;
}

std::vector<std::uint64_t> resolve_return_ks(const RunConfig& cfg) {
  if (!cfg.return_ks.empty()) return cfg.return_ks;
  const std::uint64_t top = std::min<std::uint64_t>(cfg.n_max, 1000);
  std::vector<std::uint64_t> out;
  for (std::uint64_t decade = 1; decade <= top; decade *= 10) {
    for (std::uint64_t m : {1, 2, 5}) {
      if (m * decade <= top) out.push_back(m * decade);
    }
  }
  return out;
}

int corridor_check(const RunConfig& cfg, std::ostream& out) {
  const auto table = resolve_table(cfg);
  const auto& h = table.horizon();
  json j = {{"finite", h.finite},
            {"directions_checked", h.directions_checked},
            {"min_gap", table.min_gap()},
            {"digest", table.digest()}};
  if (h.max_free_path_bound) j["max_free_path_bound"] = *h.max_free_path_bound;
  if (h.open_corridor) {
    j["open_corridor"] = {
        {"direction", {h.open_corridor->direction.p, h.open_corridor->direction.q}},
        {"gap_width", h.open_corridor->gap_width}};
  }
  out << j.dump(2) << '\n';
  return h.finite ? 0 : 2;
}

void simulate(const RunConfig& cfg) {
  const auto table = resolve_table(cfg);
  StepOptions opt;
  opt.mode = cfg.mode;
  const Billiard billiard(table, opt);
  {
    auto f = open_out(cfg, "trajectory.csv");
    write_trajectory_csv(f, billiard, cfg.steps, cfg.seed, cfg.init);
  }
  json m = manifest_base(cfg, "simulate");
  m["steps"] = cfg.steps;
  m["table"] = table_block(table);
  write_json(cfg, "manifest.json", m);
}

void estimate(const RunConfig& cfg) {
  const auto table = resolve_table(cfg);
  StepOptions opt;
  opt.mode = cfg.mode;
  const BilliardSource source(table, opt, cfg.init);
  run_estimate(cfg, source, "estimate", table_block(table));
}

void baseline_walk(const RunConfig& cfg) {
  run_estimate(cfg, LazyWalkSource{}, "baseline-walk", json{{"digest", "lazy-walk"}});
}

DiffusionMatrix read_sigma2_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sigma2 file " + path.string());
  std::string header, row;
  if (!std::getline(in, header) || !std::getline(in, row)) {
    throw ConfigError("sigma2 file " + path.string() + " has no data row");
  }
  const auto names = split_csv(header);
  const auto cells = split_csv(row);
  if (names.size() != cells.size()) throw ConfigError("sigma2 file: ragged row");
  auto field = [&](std::string_view name) -> const std::string& {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return cells[i];
    }
    throw ConfigError("sigma2 file lacks column '" + std::string(name) + "'");
  };
  auto num = [&](std::string_view name) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(field(name), &used);
    } catch (const std::exception&) {
      throw ConfigError("sigma2 file: bad number in '" + std::string(name) + "'");
    }
    if (used != field(name).size()) {
      throw ConfigError("sigma2 file: bad number in '" + std::string(name) + "'");
    }
    return x;
  };
  const std::string method = field("method");
  SigmaMethod sm = SigmaMethod::given;
  if (method == "empirical") sm = SigmaMethod::empirical;
  else if (method == "green-kubo") sm = SigmaMethod::green_kubo;
  return DiffusionMatrix::make({num("xx"), num("xy"), num("yy")},
                               {num("stderr_xx"), num("stderr_xy"), num("stderr_yy")}, sm);
}

ConstantsReport constants(const RunConfig& cfg, std::ostream& out) {
  const auto table = resolve_table(cfg);
  DiffusionMatrix sigma;
  if (cfg.sigma2_entries) {
    const auto& e = *cfg.sigma2_entries;
    sigma = DiffusionMatrix::make({e[0], e[1], e[2]}, {}, SigmaMethod::given);
  } else if (cfg.sigma2_file) {
    sigma = read_sigma2_csv(*cfg.sigma2_file);
  } else {
    throw ConfigError("constants needs sigma2 entries or a sigma2 file");
  }
  JOptions jo;
  jo.target_err = cfg.j_target_err;
  jo.seed = cfg.seed;
  jo.workers = cfg.workers;
  const auto J = integral_J(cfg.j_method, jo);
  const auto r = theoretical_constants(table, sigma, J);

  json j = {{"version", version()},
            {"table", table_block(table)},
            {"sigma2", {{"method", to_string(sigma.method)},
                        {"entries", sym_json(sigma.sigma2)},
                        {"stderr", sym_json(sigma.stderr_)},
                        {"sqrt_det", sigma.sqrt_det}}},
            {"perimeter_factor", r.perimeter_factor},
            {"c0", r.c0},
            {"c0_err", r.c0_err},
            {"c1", r.c1},
            {"c1_err", r.c1_err},
            {"J", r.J},
            {"J_err", r.J_err},
            {"J_method", j_method_name(cfg.j_method)},
            {"c", r.c},
            {"c_err", r.c_err},
            {"I_closed", r.I_closed},
            {"I_quad", r.I_quad},
            {"notes", r.notes}};
  out << j.dump(2) << '\n';
  write_json(cfg, "constants.json", j);
  auto f = open_out(cfg, "constants.csv");
  f << "quantity,value,stderr\n";
  auto row = [&](const char* name, double v, double e) {
    f << name << ',' << format_double(v) << ',' << format_double(e) << '\n';
  };
  row("perimeter_factor", r.perimeter_factor, 0.0);
  row("c0", r.c0, r.c0_err);
  row("c1", r.c1, r.c1_err);
  row("J", r.J, r.J_err);
  row("c", r.c, r.c_err);
  row("I_closed", r.I_closed, 0.0);
  row("I_quad", r.I_quad, integral_I().quadrature_error);
  return r;
}

}  // namespace lorentz::app
