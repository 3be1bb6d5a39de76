#pragma once

#include "lane_emden/asymptotics.hpp"
#include "lane_emden/green.hpp"
#include "lane_emden/planar.hpp"
#include "lane_emden/radial.hpp"
#include "lane_emden/spectrum.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace le {

using Json = nlohmann::ordered_json;

Json to_json(const DomainSpec& d);
DomainSpec domain_from_json(const Json& j);

/// Solution files: {"kind", "p", "grid", "values", "metadata"}.
Json to_json(const RadialSolution& sol);
Json to_json(const PlanarField& field);
RadialSolution radial_from_json(const Json& j);
PlanarField planar_from_json(const Json& j);

/// Either kind of solution as read from disk.
struct Solution {
  std::optional<RadialSolution> radial;
  std::optional<PlanarField> planar;
  double p() const { return radial ? radial->p : planar->p; }
  FieldView view() const { return radial ? view_of(*radial) : view_of(*planar); }
};
Solution solution_from_json(const Json& j);

Json to_json(const ConcentrationReport& r);
Json to_json(const SpectrumReport& r);
Json to_json(const PlanarMorse& r);
Json to_json(const EnergyReport& r);
Json to_json(const NodalMetrics& m);
Json to_json(const BubbleFit& f);
Json to_json(const GreenLimitRow& r);

/// Canonical text of a JSON document (2-space indent, trailing newline).
std::string dump(const Json& j);
Json read_json(const std::filesystem::path& path);
/// Write to a temporary sibling, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& text);
inline void write_json(const std::filesystem::path& path, const Json& j) { write_atomic(path, dump(j)); }

/// Shortest round-trip decimal text of a double, as used in JSON output.
std::string format_number(double x);

}  // namespace le
