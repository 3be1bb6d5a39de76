#pragma once

#include "lane_emden/io.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace le {

inline constexpr const char* kToolVersion = "lane_emden 0.1.0";

enum class SolverKind { Radial, Planar };

/// Sweep description. The text form is one `key = value` per line with `#`
/// comments; keys are listed in parse_config.
struct ExperimentConfig {
  std::string domain = "disk";  // disk | square | annulus:<a>
  SolverKind solver = SolverKind::Radial;
  int nodal_count = 0;          // 0 positive, 1 least-energy nodal
  std::vector<double> p_values;
  bool concentration = true;
  bool morse = false;
  bool green_limits = false;
  bool nodal_metrics = false;
  std::string output_dir = "run";
  double residual_tol_rel = 1e-9;
  std::uint64_t seed = 0;
  double cstar = 64.0;
  int jmax = 12;
  int grid_nodes = 129;  // planar resolution
  int symmetry_order = 1;
  std::string init = "eigen";  // eigen | tower

  void validate() const;
  DomainSpec domain_spec() const;
};

/// Keys: domain, solver, nodal_count, p_values (comma list) or p_start with
/// p_doublings, analyze_concentration, analyze_morse, analyze_green_limits,
/// analyze_nodal_metrics, output_dir, residual_tol_rel, seed, cstar, jmax,
/// grid_nodes, symmetry_order, init. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical key = value text; the config hash is computed over it.
std::string canonical_text(const ExperimentConfig& c);
std::string config_hash(const ExperimentConfig& c);  // FNV-1a 64, hex

struct Summary {
  double sup_norm = 0.0;
  double pE = 0.0;
  double p_dirichlet = 0.0;
  int k = -1;         // -1 when not computed
  int morse = -1;
  double nl_max_radius = -1.0;
  double mu_ratio = -1.0;
  double green_residual = -1.0;
};

struct ManifestEntry {
  double p = 0.0;
  std::string file;  // relative to the output directory
  bool ok = false;
  std::string error;
  Summary summary;
};

struct RunManifest {
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::vector<ManifestEntry> entries;
};

Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);

/// Solves one schedule entry and computes its diagnostics.
Solution solve_entry(const ExperimentConfig& c, double p);
Summary summarize(const ExperimentConfig& c, const Solution& s);

/// Runs the sweep with `workers` threads. Entries recorded as ok in an
/// existing manifest with the same config hash whose files still parse are
/// reused. Writes solutions/, summary.csv and manifest.json atomically.
RunManifest run(const ExperimentConfig& c, int workers = 1);

/// CSV table with columns p, sup_norm, pE, p_dirichlet, k, morse,
/// nl_max_radius, mu_ratio, green_residual, status.
std::string summary_csv(const RunManifest& m);

/// Plot data next to the manifest: trend_<quantity>.dat (p, value) and
/// overlay_plus.dat (r, v_p(r), U(r)) for the largest p; overlay_minus.dat
/// (x, v_p^-(x), V(x - x_inf)) for nodal radial runs. Returns the paths.
std::vector<std::filesystem::path> report(const std::filesystem::path& output_dir);

}  // namespace le
