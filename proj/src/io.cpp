#include "lane_emden/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace le {

namespace {

const char* kind_name(DomainKind k) {
  switch (k) {
    case DomainKind::UnitDisk: return "disk";
    case DomainKind::Annulus: return "annulus";
    case DomainKind::Rectangle: return "rectangle";
    case DomainKind::DiskSector: return "sector";
  }
  return "?";
}

Json points_json(const std::vector<Point>& pts) {
  Json a = Json::array();
  for (const Point& x : pts) a.push_back({x[0], x[1]});
  return a;
}

}  // namespace

Json to_json(const DomainSpec& d) {
  Json j;
  j["kind"] = kind_name(d.kind);
  switch (d.kind) {
    case DomainKind::Annulus: j["inner"] = d.inner; break;
    case DomainKind::Rectangle:
      j["width"] = d.width;
      j["height"] = d.height;
      break;
    case DomainKind::DiskSector: j["order"] = d.order; break;
    case DomainKind::UnitDisk: break;
  }
  return j;
}

DomainSpec domain_from_json(const Json& j) {
  const std::string k = j.at("kind").get<std::string>();
  if (k == "disk") return DomainSpec::unit_disk();
  if (k == "annulus") return DomainSpec::annulus(j.at("inner").get<double>());
  if (k == "rectangle") return DomainSpec::rectangle(j.at("width").get<double>(), j.at("height").get<double>());
  if (k == "sector") return DomainSpec::disk_sector(j.at("order").get<int>());
  throw std::invalid_argument("unknown domain kind '" + k + "'");
}

Json to_json(const RadialSolution& sol) {
  Json j;
  j["kind"] = "radial";
  j["p"] = sol.p;
  Json g;
  g["domain"] = to_json(sol.domain);
  g["grading"] = sol.mesh.grading.kind == GradingKind::LogGraded ? "log" : "uniform";
  g["focus"] = sol.mesh.grading.focus;
  g["geometric_begin"] = sol.mesh.geometric_begin;
  g["r"] = sol.mesh.r;
  j["grid"] = std::move(g);
  j["values"] = sol.u;
  j["derivative"] = sol.du;
  Json m;
  m["nodal_count"] = sol.nodal_count;
  m["center_value"] = sol.center_value;
  m["zeros"] = sol.zeros;
  m["log_amplitude"] = sol.log_amplitude;
  m["log_mu"] = sol.log_mu;
  m["boundary_residual"] = sol.boundary_residual;
  m["collocation_discrepancy"] = sol.collocation_discrepancy;
  m["bisection_steps"] = sol.bisection_steps;
  j["metadata"] = std::move(m);
  return j;
}

RadialSolution radial_from_json(const Json& j) {
  if (j.at("kind") != "radial") throw std::invalid_argument("not a radial solution");
  RadialSolution s;
  s.p = j.at("p").get<double>();
  const Json& g = j.at("grid");
  s.domain = domain_from_json(g.at("domain"));
  s.mesh.grading.kind = g.at("grading") == "log" ? GradingKind::LogGraded : GradingKind::Uniform;
  s.mesh.grading.focus = g.at("focus").get<double>();
  s.mesh.geometric_begin = g.at("geometric_begin").get<std::size_t>();
  s.mesh.r = g.at("r").get<std::vector<double>>();
  s.u = j.at("values").get<std::vector<double>>();
  s.du = j.at("derivative").get<std::vector<double>>();
  if (s.u.size() != s.mesh.r.size() || s.du.size() != s.mesh.r.size())
    throw std::invalid_argument("radial solution arrays differ in length");
  const Json& m = j.at("metadata");
  s.nodal_count = m.at("nodal_count").get<int>();
  s.center_value = m.at("center_value").get<double>();
  s.zeros = m.at("zeros").get<std::vector<double>>();
  s.log_amplitude = m.at("log_amplitude").get<double>();
  s.log_mu = m.at("log_mu").get<double>();
  s.boundary_residual = m.at("boundary_residual").get<double>();
  s.collocation_discrepancy = m.at("collocation_discrepancy").get<double>();
  s.bisection_steps = m.at("bisection_steps").get<int>();
  return s;
}

Json to_json(const PlanarField& f) {
  Json j;
  j["kind"] = "planar";
  j["p"] = f.p;
  Json g;
  g["domain"] = to_json(f.grid->domain);
  g["type"] = f.grid->kind == GridKind::Cartesian ? "cartesian" : "polar";
  g["resolution"] = f.grid->resolution;
  g["ntheta"] = f.grid->polar.ntheta;
  g["r_min"] = f.grid->polar.r_min;
  j["grid"] = std::move(g);
  j["values"] = std::vector<double>(f.u.data(), f.u.data() + f.u.size());
  Json m;
  m["iterations"] = f.iterations;
  m["residual"] = f.residual;
  m["symmetry"] = f.symmetry;
  m["antisymmetric"] = f.antisymmetric;
  m["init"] = f.init;
  j["metadata"] = std::move(m);
  return j;
}

PlanarField planar_from_json(const Json& j) {
  if (j.at("kind") != "planar") throw std::invalid_argument("not a planar solution");
  const Json& g = j.at("grid");
  PolarOptions po;
  po.ntheta = g.at("ntheta").get<int>();
  po.r_min = g.at("r_min").get<double>();
  auto grid = std::make_shared<const PlanarGrid>(
      build_planar_grid(domain_from_json(g.at("domain")), g.at("resolution").get<int>(), po));
  const auto values = j.at("values").get<std::vector<double>>();
  if (values.size() != grid->size()) throw std::invalid_argument("planar values do not match the grid");
  PlanarField f;
  f.grid = grid;
  f.p = j.at("p").get<double>();
  f.u = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  const Json& m = j.at("metadata");
  f.iterations = m.at("iterations").get<int>();
  f.residual = m.at("residual").get<double>();
  f.symmetry = m.at("symmetry").get<int>();
  f.antisymmetric = m.at("antisymmetric").get<bool>();
  f.init = m.at("init").get<std::string>();
  return f;
}

Solution solution_from_json(const Json& j) {
  Solution s;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "radial")
    s.radial = radial_from_json(j);
  else if (kind == "planar")
    s.planar = planar_from_json(j);
  else
    throw std::invalid_argument("unknown solution kind '" + kind + "'");
  return s;
}

Json to_json(const ConcentrationReport& r) {
  Json j;
  j["k"] = r.k();
  j["cstar"] = r.cstar;
  j["separation_cutoff"] = r.separation_cutoff;
  j["points"] = points_json(r.points);
  j["log_mu"] = r.log_mu;
  j["peaks"] = r.peaks;
  j["separation"] = r.separation;
  j["p3"] = r.p3;
  j["p4"] = r.p4;
  j["next_candidate"] = {r.next_candidate[0], r.next_candidate[1]};
  j["stop"] = r.stop == StopReason::Threshold ? "threshold" : r.stop == StopReason::Separation ? "separation" : "guard";
  return j;
}

Json to_json(const SpectrumReport& r) {
  Json j;
  j["total"] = r.total;
  j["j_max"] = r.j_max;
  j["indeterminate"] = r.indeterminate;
  Json modes = Json::array();
  for (const ModeCount& m : r.modes)
    modes.push_back({{"j", m.j}, {"negative", m.negative}, {"eigenvalues", m.eigenvalues}, {"indeterminate", m.indeterminate}});
  j["modes"] = std::move(modes);
  return j;
}

Json to_json(const PlanarMorse& r) {
  Json j;
  j["index"] = r.index();
  j["inertia"] = r.inertia;
  j["ritz"] = r.ritz;
  j["ritz_values"] = r.ritz_values;
  j["indeterminate"] = r.indeterminate;
  return j;
}

Json to_json(const EnergyReport& e) {
  Json j;
  j["two_pE"] = e.two_pE;
  j["p_dirichlet"] = e.p_dirichlet;
  j["p_lp1"] = e.p_lp1;
  j["p_lp"] = e.p_lp;
  j["p_dirichlet_plus"] = e.p_dirichlet_plus;
  j["p_dirichlet_minus"] = e.p_dirichlet_minus;
  j["p_lp1_plus"] = e.p_lp1_plus;
  j["p_lp1_minus"] = e.p_lp1_minus;
  j["nodal"] = e.nodal;
  j["whole_above_8pie"] = e.whole_above;
  j["plus_above_8pie"] = e.plus_above;
  j["minus_above_8pie"] = e.minus_above;
  return j;
}

Json to_json(const NodalMetrics& m) {
  Json j;
  j["x_plus"] = {m.x_plus[0], m.x_plus[1]};
  j["x_minus"] = {m.x_minus[0], m.x_minus[1]};
  j["log_mu_plus"] = m.log_mu_plus;
  j["log_mu_minus"] = m.log_mu_minus;
  j["nl_max_radius"] = m.nl_max_radius;
  j["dist_plus"] = m.dist_plus;
  j["dist_minus"] = m.dist_minus;
  j["mu_ratio"] = m.mu_ratio;
  j["nl_over_mu_minus"] = m.nl_over_mu_minus;
  j["dist_plus_over_mu"] = m.dist_plus_over_mu;
  j["dist_minus_over_mu"] = m.dist_minus_over_mu;
  return j;
}

Json to_json(const BubbleFit& f) {
  Json j;
  j["family"] = f.family == ProfileKind::Regular ? "regular" : "singular";
  if (f.family == ProfileKind::Singular) j["ell"] = f.ell;
  j["residual"] = f.residual;
  j["rms"] = f.rms;
  return j;
}

Json to_json(const GreenLimitRow& r) {
  Json j;
  j["p"] = r.p;
  j["masses"] = r.masses;
  j["residual"] = r.residual;
  j["mass_energy"] = r.mass_energy;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_number(double x) { return Json(x).dump(); }

}  // namespace le
