#include "lane_emden/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace le {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("key '" + key + "' expects a boolean, got '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument("key '" + key + "' expects a number, got '" + v + "'");
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  if (x != std::floor(x)) throw std::invalid_argument("key '" + key + "' expects an integer, got '" + v + "'");
  return static_cast<int>(x);
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

std::string entry_file(double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "solutions/p_%.10g.json", p);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (p_values.empty()) throw std::invalid_argument("empty p schedule");
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    if (!(p_values[i] > 1.0)) throw std::invalid_argument("exponents must exceed 1");
    if (i > 0 && !(p_values[i] > p_values[i - 1])) throw std::invalid_argument("p schedule must be increasing");
  }
  const DomainSpec d = domain_spec();
  if (solver == SolverKind::Radial && d.kind != DomainKind::UnitDisk && d.kind != DomainKind::Annulus)
    throw std::invalid_argument("the radial solver needs a disk or an annulus");
  if (nodal_count < 0 || nodal_count > (solver == SolverKind::Radial ? 2 : 1))
    throw std::invalid_argument("unsupported nodal_count");
  if (solver == SolverKind::Planar && p_values.back() > 50.0) throw std::invalid_argument("planar exponents are capped at 50");
  if (!(residual_tol_rel > 0.0)) throw std::invalid_argument("residual_tol_rel must be positive");
  if (!(cstar > 0.0)) throw std::invalid_argument("cstar must be positive");
  if (jmax < 8) throw std::invalid_argument("jmax must be at least 8");
  if (grid_nodes < 32) throw std::invalid_argument("grid_nodes must be at least 32");
  if (symmetry_order < 1) throw std::invalid_argument("symmetry_order must be positive");
  if (init != "eigen" && init != "tower") throw std::invalid_argument("init must be eigen or tower");
  if (init == "tower" && d.kind != DomainKind::UnitDisk) throw std::invalid_argument("tower initial guesses need the disk");
}

DomainSpec ExperimentConfig::domain_spec() const {
  if (domain == "disk") return DomainSpec::unit_disk();
  if (domain == "square") return DomainSpec::rectangle(1.0, 1.0);
  if (domain.rfind("annulus:", 0) == 0) return DomainSpec::annulus(parse_double("domain", domain.substr(8)));
  throw std::invalid_argument("unknown domain '" + domain + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_list = false;
  double p_start = 0.0;
  int doublings = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (key == "domain") c.domain = v;
    else if (key == "solver") {
      if (v == "radial") c.solver = SolverKind::Radial;
      else if (v == "planar") c.solver = SolverKind::Planar;
      else throw std::invalid_argument("solver must be radial or planar");
    } else if (key == "nodal_count") c.nodal_count = parse_int(key, v);
    else if (key == "p_values") {
      c.p_values.clear();
      std::istringstream items(v);
      std::string item;
      while (std::getline(items, item, ',')) c.p_values.push_back(parse_double(key, trim(item)));
      have_list = true;
    } else if (key == "p_start") p_start = parse_double(key, v);
    else if (key == "p_doublings") doublings = parse_int(key, v);
    else if (key == "analyze_concentration") c.concentration = parse_bool(key, v);
    else if (key == "analyze_morse") c.morse = parse_bool(key, v);
    else if (key == "analyze_green_limits") c.green_limits = parse_bool(key, v);
    else if (key == "analyze_nodal_metrics") c.nodal_metrics = parse_bool(key, v);
    else if (key == "output_dir") c.output_dir = v;
    else if (key == "residual_tol_rel") c.residual_tol_rel = parse_double(key, v);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(key, v));
    else if (key == "cstar") c.cstar = parse_double(key, v);
    else if (key == "jmax") c.jmax = parse_int(key, v);
    else if (key == "grid_nodes") c.grid_nodes = parse_int(key, v);
    else if (key == "symmetry_order") c.symmetry_order = parse_int(key, v);
    else if (key == "init") c.init = v;
    else throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (doublings >= 0 || p_start > 0.0) {
    if (have_list) throw std::invalid_argument("give either p_values or p_start/p_doublings");
    if (doublings < 0) doublings = 0;
    for (int i = 0; i <= doublings; ++i) c.p_values.push_back(std::ldexp(p_start, i));
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_text(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "domain = " << c.domain << "\n";
  o << "solver = " << (c.solver == SolverKind::Radial ? "radial" : "planar") << "\n";
  o << "nodal_count = " << c.nodal_count << "\n";
  o << "p_values = ";
  for (std::size_t i = 0; i < c.p_values.size(); ++i) o << (i ? ", " : "") << format_number(c.p_values[i]);
  o << "\n";
  o << "analyze_concentration = " << bool_text(c.concentration) << "\n";
  o << "analyze_morse = " << bool_text(c.morse) << "\n";
  o << "analyze_green_limits = " << bool_text(c.green_limits) << "\n";
  o << "analyze_nodal_metrics = " << bool_text(c.nodal_metrics) << "\n";
  o << "output_dir = " << c.output_dir << "\n";
  o << "residual_tol_rel = " << format_number(c.residual_tol_rel) << "\n";
  o << "seed = " << c.seed << "\n";
  o << "cstar = " << format_number(c.cstar) << "\n";
  o << "jmax = " << c.jmax << "\n";
  o << "grid_nodes = " << c.grid_nodes << "\n";
  o << "symmetry_order = " << c.symmetry_order << "\n";
  o << "init = " << c.init << "\n";
  return o.str();
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical_text(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json to_json(const RunManifest& m) {
  Json j;
  j["config_hash"] = m.config_hash;
  j["tool_version"] = m.tool_version;
  Json entries = Json::array();
  for (const ManifestEntry& e : m.entries) {
    Json s;
    s["sup_norm"] = e.summary.sup_norm;
    s["pE"] = e.summary.pE;
    s["p_dirichlet"] = e.summary.p_dirichlet;
    s["k"] = e.summary.k;
    s["morse"] = e.summary.morse;
    s["nl_max_radius"] = e.summary.nl_max_radius;
    s["mu_ratio"] = e.summary.mu_ratio;
    s["green_residual"] = e.summary.green_residual;
    entries.push_back({{"p", e.p}, {"file", e.file}, {"ok", e.ok}, {"error", e.error}, {"summary", std::move(s)}});
  }
  j["entries"] = std::move(entries);
  return j;
}

RunManifest manifest_from_json(const Json& j) {
  RunManifest m;
  m.config_hash = j.at("config_hash").get<std::string>();
  m.tool_version = j.at("tool_version").get<std::string>();
  for (const Json& e : j.at("entries")) {
    ManifestEntry x;
    x.p = e.at("p").get<double>();
    x.file = e.at("file").get<std::string>();
    x.ok = e.at("ok").get<bool>();
    x.error = e.at("error").get<std::string>();
    const Json& s = e.at("summary");
    x.summary.sup_norm = s.at("sup_norm").get<double>();
    x.summary.pE = s.at("pE").get<double>();
    x.summary.p_dirichlet = s.at("p_dirichlet").get<double>();
    x.summary.k = s.at("k").get<int>();
    x.summary.morse = s.at("morse").get<int>();
    x.summary.nl_max_radius = s.at("nl_max_radius").get<double>();
    x.summary.mu_ratio = s.at("mu_ratio").get<double>();
    x.summary.green_residual = s.at("green_residual").get<double>();
    m.entries.push_back(std::move(x));
  }
  return m;
}

Solution solve_entry(const ExperimentConfig& c, double p) {
  const DomainSpec d = c.domain_spec();
  Solution s;
  if (c.solver == SolverKind::Radial) {
    s.radial = solve_radial(p, c.nodal_count, d);
    return s;
  }
  PlanarOptions opt;
  opt.tol = c.residual_tol_rel;
  opt.seed = c.seed;
  opt.symmetry = c.symmetry_order;
  opt.init = c.init == "tower" ? InitKind::Tower : InitKind::Eigen;
  std::shared_ptr<const PlanarGrid> grid;
  if (opt.init == InitKind::Tower) {
    const int quantum = std::lcm(4, c.symmetry_order);
    grid = tower_grid(p, c.grid_nodes, (64 + quantum - 1) / quantum * quantum);
  } else {
    grid = std::make_shared<const PlanarGrid>(build_planar_grid(d, c.grid_nodes));
  }
  if (c.nodal_count == 0) {
    s.planar = solve_positive(p, grid, opt);
  } else {
    opt.antisymmetric = d.kind == DomainKind::Rectangle && opt.init == InitKind::Eigen;
    s.planar = solve_nodal(p, grid, opt);
  }
  return s;
}

Summary summarize(const ExperimentConfig& c, const Solution& s) {
  Summary out;
  const FieldView f = s.view();
  const EnergyReport e = s.radial ? energy_report(*s.radial) : energy_report(*s.planar);
  out.sup_norm = s.radial ? s.radial->sup_norm() : s.planar->sup_norm();
  out.pE = 0.5 * e.two_pE;
  out.p_dirichlet = e.p_dirichlet;
  std::optional<ConcentrationReport> rep;
  if (c.concentration || c.green_limits) rep = extract_concentration_points(f, c.cstar);
  if (c.concentration) out.k = rep->k();
  if (c.morse) {
    MorseOptions mo;
    mo.j_max = c.jmax;
    out.morse = s.radial ? morse_index_radial(*s.radial, mo).total : morse_index_planar(*s.planar).index();
  }
  if (c.nodal_metrics && e.nodal) {
    const NodalMetrics m = nodal_metrics(f);
    out.nl_max_radius = m.nl_max_radius;
    out.mu_ratio = m.mu_ratio;
  }
  if (c.green_limits && f.domain.kind == DomainKind::UnitDisk && !e.nodal)
    out.green_residual = green_limit_residual(f, rep->points, estimate_masses(f, *rep));
  return out;
}

std::string summary_csv(const RunManifest& m) {
  std::ostringstream o;
  o << "p,sup_norm,pE,p_dirichlet,k,morse,nl_max_radius,mu_ratio,green_residual,status\n";
  for (const ManifestEntry& e : m.entries) {
    const Summary& s = e.summary;
    o << format_number(e.p) << ',';
    if (e.ok)
      o << format_number(s.sup_norm) << ',' << format_number(s.pE) << ',' << format_number(s.p_dirichlet) << ',' << s.k
        << ',' << s.morse << ',' << format_number(s.nl_max_radius) << ',' << format_number(s.mu_ratio) << ','
        << format_number(s.green_residual) << ",ok\n";
    else
      o << ",,,,,,,,failed\n";
  }
  return o.str();
}

RunManifest run(const ExperimentConfig& c, int workers) {
  c.validate();
  if (workers < 1) throw std::invalid_argument("workers must be positive");
  const fs::path dir = c.output_dir;
  fs::create_directories(dir / "solutions");
  const std::string hash = config_hash(c);

  // Entries from a previous run of the same configuration.
  std::vector<std::optional<ManifestEntry>> done(c.p_values.size());
  if (fs::exists(dir / "manifest.json")) {
    try {
      const RunManifest old = manifest_from_json(read_json(dir / "manifest.json"));
      if (old.config_hash == hash)
        for (const ManifestEntry& e : old.entries) {
          if (!e.ok) continue;
          const auto it = std::find(c.p_values.begin(), c.p_values.end(), e.p);
          if (it == c.p_values.end()) continue;
          try {
            solution_from_json(read_json(dir / e.file));
            done[it - c.p_values.begin()] = e;
          } catch (const std::exception&) {
          }
        }
    } catch (const std::exception&) {
      // Unreadable manifests are replaced.
    }
  }

  std::vector<ManifestEntry> entries(c.p_values.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < c.p_values.size(); ++i) {
    if (done[i])
      entries[i] = *done[i];
    else
      todo.push_back(i);
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < todo.size();) {
      const std::size_t i = todo[t];
      ManifestEntry e;
      e.p = c.p_values[i];
      e.file = entry_file(e.p);
      try {
        const Solution s = solve_entry(c, e.p);
        write_json(dir / e.file, s.radial ? to_json(*s.radial) : to_json(*s.planar));
        e.summary = summarize(c, s);
        e.ok = true;
      } catch (const std::exception& ex) {
        e.ok = false;
        e.error = ex.what();
      }
      entries[i] = std::move(e);  // distinct slots, no lock needed
    }
  };
  const int n = std::min<int>(workers, static_cast<int>(std::max<std::size_t>(todo.size(), 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  RunManifest m;
  m.config_hash = hash;
  m.entries = std::move(entries);
  write_atomic(dir / "config.txt", canonical_text(c));
  write_atomic(dir / "summary.csv", summary_csv(m));
  write_json(dir / "manifest.json", to_json(m));
  return m;
}

namespace {

void write_series(const fs::path& path, const std::vector<std::pair<double, double>>& rows,
                  std::vector<fs::path>& written) {
  std::ostringstream o;
  for (const auto& [a, b] : rows) o << format_number(a) << ' ' << format_number(b) << '\n';
  write_atomic(path, o.str());
  written.push_back(path);
}

}  // namespace

std::vector<fs::path> report(const fs::path& dir) {
  const RunManifest m = manifest_from_json(read_json(dir / "manifest.json"));
  const ExperimentConfig c = load_config(dir / "config.txt");
  std::vector<const ManifestEntry*> ok;
  for (const ManifestEntry& e : m.entries) {
    if (!e.ok) continue;
    if (!fs::exists(dir / e.file)) throw std::invalid_argument("missing solution file " + (dir / e.file).string());
    ok.push_back(&e);
  }
  if (ok.empty()) throw std::invalid_argument("manifest has no converged entries");

  std::vector<fs::path> written;
  auto trend = [&](const char* name, auto get, bool only_set) {
    std::vector<std::pair<double, double>> rows;
    for (const ManifestEntry* e : ok) {
      const double v = get(e->summary);
      if (only_set && v < 0.0) continue;
      rows.emplace_back(e->p, v);
    }
    if (!rows.empty()) write_series(dir / (std::string("trend_") + name + ".dat"), rows, written);
  };
  trend("sup_norm", [](const Summary& s) { return s.sup_norm; }, false);
  trend("pE", [](const Summary& s) { return s.pE; }, false);
  trend("p_dirichlet", [](const Summary& s) { return s.p_dirichlet; }, false);
  trend("k", [](const Summary& s) { return static_cast<double>(s.k); }, true);
  trend("morse", [](const Summary& s) { return static_cast<double>(s.morse); }, true);
  trend("nl_max_radius", [](const Summary& s) { return s.nl_max_radius; }, true);
  trend("mu_ratio", [](const Summary& s) { return s.mu_ratio; }, true);
  trend("green_residual", [](const Summary& s) { return s.green_residual; }, true);

  // Overlays at the largest converged p.
  const Solution s = solution_from_json(read_json(dir / ok.back()->file));
  const FieldView f = s.view();
  std::size_t ip = 0, im = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.values[i] > f.values[ip]) ip = i;
    if (f.values[i] < f.values[im]) im = i;
  }
  {
    const Point c0 = refine_extremum(f, ip);
    const double uc = f.eval(c0), mu = std::exp(log_scale(f.p, uc));
    std::ostringstream o;
    for (int i = 0; i <= 200; ++i) {
      const double r = 5.0 * i / 200;
      const double v = f.p / uc * (f.eval({c0[0] + mu * r, c0[1]}) - uc);
      o << format_number(r) << ' ' << format_number(v) << ' ' << format_number(eval_U_radial(r)) << '\n';
    }
    write_atomic(dir / "overlay_plus.dat", o.str());
    written.push_back(dir / "overlay_plus.dat");
  }
  if (s.radial && f.values[im] < 0.0 && c.nodal_count > 0) {
    const Point c1 = refine_extremum(f, im);
    const double uc = f.eval(c1), lmu = log_scale(f.p, uc), mu = std::exp(lmu);
    const double ell_p = std::exp(std::log(std::hypot(c1[0], c1[1])) - lmu);
    const RescaledProfile prof = rescale(f, c1, mu, 0.5 * ell_p);
    const BubbleFit fit = fit_bubble(prof, ProfileKind::Singular);
    const SingularProfileParams q = singular_params(fit.ell);
    std::ostringstream o;
    for (int i = 0; i <= 200; ++i) {
      const double x = 0.5 * ell_p * (2.0 * i / 200 - 1.0);
      const double v = f.p / uc * (f.eval({c1[0] + mu * x, c1[1]}) - uc);
      o << format_number(x) << ' ' << format_number(v) << ' ' << format_number(eval_V(std::abs(x + fit.ell), q)) << '\n';
    }
    write_atomic(dir / "overlay_minus.dat", o.str());
    written.push_back(dir / "overlay_minus.dat");
  }
  return written;
}

}  // namespace le
