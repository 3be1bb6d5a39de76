// Command-line driver: solvers, analyses and sweeps.
//
// Exit codes: 0 success, 1 validation error, 2 solver failure,
// 3 a requested check did not hold.

#include "lane_emden/experiment.hpp"
#include "lane_emden/green.hpp"
#include "lane_emden/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <regex>

namespace fs = std::filesystem;
using namespace le;

namespace {

struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const Json& j, const std::string& out) {
  if (out.empty())
    std::cout << dump(j);
  else
    write_json(out, j);
}

DomainSpec parse_domain(const std::string& s) {
  ExperimentConfig c;
  c.domain = s;
  return c.domain_spec();
}

// Files matching a shell-style pattern in its directory (* and ? only).
std::vector<fs::path> expand_glob(const std::string& pattern) {
  const fs::path pat(pattern);
  const fs::path dir = pat.has_parent_path() ? pat.parent_path() : fs::path(".");
  std::string rx;
  for (char ch : pat.filename().string()) {
    if (ch == '*') rx += ".*";
    else if (ch == '?') rx += '.';
    else if (std::string("\\^$.|+()[]{}").find(ch) != std::string::npos) rx += std::string("\\") + ch;
    else rx += ch;
  }
  const std::regex re(rx);
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) throw std::invalid_argument("no directory " + dir.string());
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && std::regex_match(e.path().filename().string(), re)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

Json analyze(const Solution& s, double cstar, const std::string& plot_prefix) {
  const FieldView f = s.view();
  Json j;
  j["p"] = f.p;
  const ConcentrationReport rep = extract_concentration_points(f, cstar);
  j["concentration"] = to_json(rep);
  j["energy"] = s.radial ? to_json(energy_report(*s.radial)) : to_json(energy_report(*s.planar));

  std::size_t ip = 0, im = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.values[i] > f.values[ip]) ip = i;
    if (f.values[i] < f.values[im]) im = i;
  }
  const Point top = refine_extremum(f, std::abs(f.values[ip]) >= std::abs(f.values[im]) ? ip : im);
  const double mu = scale_of(f, top);
  const RescaledProfile plus = rescale(f, top, mu, 5.0, 65, true);
  j["fit_plus"] = to_json(fit_bubble(plus, ProfileKind::Regular));
  if (!plot_prefix.empty()) {
    std::ostringstream o;
    for (std::size_t i = 0; i < plus.x.size(); ++i)
      if (plus.x[i][1] == 0.0 && plus.x[i][0] >= 0.0)
        o << format_number(plus.x[i][0]) << ' ' << format_number(plus.v[i]) << ' '
          << format_number(eval_U(plus.x[i])) << '\n';
    write_atomic(plot_prefix + "_plus.dat", o.str());
  }
  if (f.values[ip] > 0.0 && f.values[im] < 0.0 && !f.zero_set.empty()) {
    const NodalMetrics m = nodal_metrics(f);
    j["nodal"] = to_json(m);
    const double ell_p = std::exp(std::log(std::hypot(m.x_minus[0], m.x_minus[1])) - m.log_mu_minus);
    if (ell_p > 0.5) {
      const RescaledProfile minus = rescale(f, m.x_minus, m.mu_minus, 0.5 * ell_p, 65, true);
      const BubbleFit fit = fit_bubble(minus, ProfileKind::Singular);
      j["fit_minus"] = to_json(fit);
      if (!plot_prefix.empty()) {
        const SingularProfileParams q = singular_params(fit.ell);
        std::ostringstream o;
        for (std::size_t i = 0; i < minus.x.size(); ++i)
          if (minus.x[i][1] == 0.0)
            o << format_number(minus.x[i][0]) << ' ' << format_number(minus.v[i]) << ' '
              << format_number(eval_V(std::hypot(minus.x[i][0] + fit.ell * minus.axis[0],
                                                 minus.x[i][1] + fit.ell * minus.axis[1]), q))
              << '\n';
        write_atomic(plot_prefix + "_minus.dat", o.str());
      }
    }
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane-Emden solutions and their large-exponent asymptotics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  double p = 0.0;
  int k = 0, nodes = 0, sym = 1, jmax = 12, workers = 1;
  std::uint64_t seed = 0;
  double cstar = 64.0;
  std::string domain = "disk", init = "eigen", out, in, config, report_path, family, plot;
  bool nodal = false, check = false;
  std::vector<double> ells{0.1, 0.5, 1.0, 2.0, 5.0};
  int expect = -1;

  auto* sr = app.add_subcommand("solve-radial", "radial shooting solve on the disk or an annulus");
  sr->add_option("--p", p, "exponent")->required();
  sr->add_option("--k", k, "interior zeros (0 positive, 1 nodal)")->check(CLI::Range(0, 2));
  sr->add_option("--domain", domain, "disk | annulus:<a>");
  sr->add_option("--nodes", nodes, "uniform mesh with this many nodes instead of the graded default");
  sr->add_option("--out", out, "solution JSON (stdout if absent)");

  auto* sp = app.add_subcommand("solve-planar", "Newton solve on a square or disk grid");
  sp->add_option("--p", p, "exponent")->required();
  sp->add_option("--domain", domain, "square | disk | annulus:<a>");
  sp->add_option("--sym", sym, "rotation order enforced on polar grids");
  sp->add_option("--init", init, "eigen | tower")->check(CLI::IsMember({"eigen", "tower"}));
  sp->add_flag("--nodal", nodal, "sign-changing solution");
  sp->add_option("--nodes", nodes, "grid resolution");
  sp->add_option("--seed", seed, "perturbation seed for tower initial guesses");
  sp->add_option("--out", out, "solution JSON");

  auto* an = app.add_subcommand("analyze", "concentration, energies, bubble fits, nodal metrics");
  an->add_option("--in", in, "solution JSON")->required();
  an->add_option("--cstar", cstar, "exhaustion threshold C*");
  an->add_option("--report", report_path, "report JSON (stdout if absent)");
  an->add_option("--plot", plot, "prefix for rescaled-profile plot data");

  auto* mo = app.add_subcommand("morse", "Morse index by angular modes (radial) or inertia (planar)");
  mo->add_option("--in", in, "solution JSON")->required();
  mo->add_option("--jmax", jmax, "largest angular mode")->check(CLI::Range(8, 1000));
  mo->add_option("--out", out, "per-mode CSV (stdout if absent)");
  mo->add_option("--report", report_path, "JSON total");
  mo->add_option("--expect", expect, "exit 3 unless the index equals this value");

  auto* li = app.add_subcommand("limits", "sqrt(p) u_p, p u_p and Green-limit checks over a family");
  li->add_option("--family", family, "glob of solution files")->required();
  li->add_option("--cstar", cstar, "exhaustion threshold C*");
  li->add_option("--report", report_path, "report JSON (stdout if absent)");
  li->add_flag("--check", check, "exit 3 unless the residuals decrease along the family");

  auto* pr = app.add_subcommand("profiles", "Liouville masses and residuals");
  pr->add_option("--ell", ells, "vanishing radii of the singular profile");
  pr->add_option("--out", out, "JSON (stdout if absent)");

  auto* ru = app.add_subcommand("run", "p sweep described by a config file");
  ru->add_option("--config", config, "key = value file")->required();
  ru->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  auto* re = app.add_subcommand("report", "plot data from a finished sweep");
  re->add_option("--in", in, "sweep output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sr) {
      RadialOptions opt;
      const DomainSpec d = parse_domain(domain);
      if (nodes > 0) opt.mesh = build_radial_mesh(d, nodes, Grading::uniform());
      const RadialSolution s = solve_radial(p, k, d, opt);
      emit(to_json(s), out);
    } else if (*sp) {
      const DomainSpec d = parse_domain(domain);
      PlanarOptions opt;
      opt.symmetry = sym;
      opt.seed = seed;
      opt.init = init == "tower" ? InitKind::Tower : InitKind::Eigen;
      std::shared_ptr<const PlanarGrid> grid;
      if (opt.init == InitKind::Tower) {
        if (d.kind != DomainKind::UnitDisk) throw std::invalid_argument("tower initial guesses need the disk");
        nodal = true;
        grid = tower_grid(p, nodes > 0 ? nodes : 160);
      } else {
        grid = std::make_shared<const PlanarGrid>(build_planar_grid(d, nodes > 0 ? nodes : 129));
      }
      PlanarField f;
      if (nodal) {
        opt.antisymmetric = d.kind == DomainKind::Rectangle;
        f = solve_nodal(p, grid, opt);
      } else {
        f = solve_positive(p, grid, opt);
      }
      emit(to_json(f), out);
    } else if (*an) {
      emit(analyze(solution_from_json(read_json(in)), cstar, plot), report_path);
    } else if (*mo) {
      const Solution s = solution_from_json(read_json(in));
      Json j;
      int index = 0;
      if (s.radial) {
        MorseOptions opt;
        opt.j_max = jmax;
        const SpectrumReport r = morse_index_radial(*s.radial, opt);
        std::ostringstream csv;
        csv << "j,negative,lambda1,lambda2,lambda3,indeterminate\n";
        for (const ModeCount& m : r.modes) {
          csv << m.j << ',' << m.negative;
          for (double e : m.eigenvalues) csv << ',' << format_number(e);
          csv << ',' << (m.indeterminate ? "true" : "false") << '\n';
        }
        if (out.empty()) std::cout << csv.str(); else write_atomic(out, csv.str());
        j = to_json(r);
        index = r.total;
      } else {
        const PlanarMorse r = morse_index_planar(*s.planar);
        j = to_json(r);
        index = r.index();
      }
      if (!report_path.empty()) write_json(report_path, j);
      else if (!out.empty() || s.planar) std::cout << dump(j);
      if (expect >= 0 && index != expect) throw CheckFailed("Morse index " + std::to_string(index) + ", expected " + std::to_string(expect));
    } else if (*li) {
      const auto files = expand_glob(family);
      if (files.empty()) throw std::invalid_argument("no files match " + family);
      std::vector<FieldView> views;
      for (const auto& path : files) views.push_back(solution_from_json(read_json(path)).view());
      std::sort(views.begin(), views.end(), [](const FieldView& a, const FieldView& b) { return a.p < b.p; });
      std::vector<ConcentrationReport> reps;
      for (const FieldView& v : views) reps.push_back(extract_concentration_points(v, cstar));
      Json j;
      Json rows = Json::array();
      for (const LimitRow& r : limit_function_check(views, reps.back()))
        rows.push_back({{"p", r.p}, {"sqrtp_sup", r.sqrtp_sup}, {"cauchy", r.cauchy}});
      j["limit_function"] = rows;
      bool decreasing = true;
      for (std::size_t i = 1; i < rows.size(); ++i)
        decreasing = decreasing && rows[i]["sqrtp_sup"].get<double>() < rows[i - 1]["sqrtp_sup"].get<double>();
      if (views.front().domain.kind == DomainKind::UnitDisk) {
        const bool nodal_family = std::any_of(views.begin(), views.end(), [](const FieldView& v) {
          return *std::min_element(v.values.begin(), v.values.end()) < 0.0;
        });
        Json green = Json::array();
        const auto grows = check_green_limit(views, reps);
        for (const auto& g : grows) green.push_back(to_json(g));
        j["green_limit"] = green;
        j["green_limit_exploratory"] = nodal_family;
        // Only positive families have a single-mass Green limit to check.
        for (std::size_t i = 1; i < grows.size() && !nodal_family; ++i)
          decreasing = decreasing && grows[i].residual < grows[i - 1].residual;
      }
      j["decreasing"] = decreasing;
      emit(j, report_path);
      if (check && !decreasing) throw CheckFailed("residuals do not decrease along the family");
    } else if (*pr) {
      Json j;
      j["mass_U"] = mass_U();
      j["mass_U_target"] = 8.0 * std::numbers::pi;
      Json rows = Json::array();
      for (double ell : ells) {
        const SingularProfileParams q = singular_params(ell);
        rows.push_back({{"ell", ell}, {"alpha", q.alpha}, {"beta", q.beta}, {"mass_V", mass_V(q)},
                        {"target", 4.0 * std::numbers::pi * q.alpha}, {"V_at_ell", eval_V(ell, q)},
                        {"dV_at_ell", eval_V_derivative(ell, q)}});
      }
      j["singular"] = rows;
      emit(j, out);
    } else if (*ru) {
      const ExperimentConfig c = load_config(config);
      const RunManifest m = run(c, workers);
      std::cout << summary_csv(m);
      for (const ManifestEntry& e : m.entries)
        if (!e.ok) {
          std::cerr << "p = " << e.p << ": " << e.error << "\n";
          return 2;
        }
    } else if (*re) {
      for (const auto& path : report(in)) std::cout << path.string() << "\n";
    }
  } catch (const CheckFailed& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
