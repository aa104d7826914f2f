#pragma once

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

#include "dosc/normalform.hpp"
#include "dosc/oscint.hpp"
#include "dosc/randol.hpp"

namespace dosc {

using Json = nlohmann::ordered_json;

/// Parsed phase file; `exact` is the phase as an exact polynomial.
struct PhaseInput {
  DPhase phase;
  Amplitude amplitude;
  Polynomial exact;
  std::string source;
};

/// Throws Config with a "source:line: message" text.
PhaseInput parse_phase_input(const std::string& text, const std::string& source = "<input>");
PhaseInput load_phase_input(const std::string& path);

/// 1 config, 2 reduction, 3 accuracy, 4 inconclusive.
int exit_code(ErrorKind kind);

/// Support, polygon, distance, normal form invariants, regime and heights.
Json analysis_json(const PhaseInput& input);

Json sample_json(const OscSample& s);
Json report_json(const ExponentReport& r);
Json witness_json(const A3Witness& w);

/// (m, n) and regime of a phase; model and normal form phases read them
/// off directly, polynomial phases go through the normal form pipeline.
struct PhaseInvariants {
  std::optional<int> m;
  std::optional<int> n;
  Regime regime = Regime::LA;
};
PhaseInvariants phase_invariants(const PhaseInput& input);

struct RunManifest {
  std::string tool_version;
  std::string command;
  Json config = Json::object();
  Json grids = Json::object();
  double seconds = 0.0;
  std::vector<int> flagged_cells;
  Json verdicts = Json::object();
  std::vector<std::string> outputs;

  Json to_json() const;
  static RunManifest from_json(const Json& j);
};

/// Companion manifest path: "out.csv" -> "out.manifest.json".
std::string manifest_path_for(const std::string& csv_path);

/// Writes `body` to `path` with a leading "# manifest: NAME" line.
void write_csv(const std::string& path, const std::string& manifest_name, const std::string& body);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace dosc
