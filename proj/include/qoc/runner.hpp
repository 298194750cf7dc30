#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include <json.hpp>

#include "qoc/optimize.hpp"
#include "qoc/oracle.hpp"

namespace qoc {

// Where the initial pulse comes from.
struct InitSpec {
  std::string kind = "zeros";  // zeros | random | file
  double lo = 0.0, hi = 0.0;   // random amplitude range
  std::string path;            // pulse CSV
};

// Everything one invocation needs; echoed verbatim into result.json.
struct RunManifest {
  std::string system_path;
  std::string target_spec;   // inline "LABEL:coeff,..." or a JSON file path
  std::string initial_spec;  // same grammar
  InitSpec init;
  double tau = 0.0;
  int slices = 0;
  std::string oracle = "exact";  // exact | sampled
  MeasurementModel model;
  std::uint64_t seed = 0;
  std::string method = "ga";
  std::string line_search = "backtracking";
  StopRule stop;
  int avg_shots_f = 1;
  std::string out_dir;
};

nlohmann::json manifest_to_json(const RunManifest& m);

// Inline "LABEL:coeff,..." or, when the string names an existing file, a JSON
// array of {"label", "coeff"} objects.
SparsePauliState load_state_spec(const std::string& spec, int n_expected = -1);

struct RunArtifacts {
  std::string status;
  double final_f = 0.0;
  int iterations = 0;
  long total_queries = 0;
  int exit_code = 0;
};

// Full optimization run: writes manifest.json (never over a previous one),
// convergence.csv, final_pulse.csv (+ sidecar), result.json into out_dir.
// result.json's final_f is re-measured by a fresh oracle at call index 0 and
// excluded from total_queries, so re-evaluating final_pulse.csv with the same
// seed reproduces it.
RunArtifacts run_job(const RunManifest& manifest);

// One oracle call; prints {"f", "g", "queries"} as JSON.
int eval_job(const RunManifest& manifest, std::ostream& os);

}  // namespace qoc
