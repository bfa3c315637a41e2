#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "wscl/bounds.hpp"
#include "wscl/evaluation.hpp"
#include "wscl/graph.hpp"
#include "wscl/label_model.hpp"
#include "wscl/spectral.hpp"
#include "wscl/synthetic.hpp"

namespace wscl::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// 17 significant digits, enough for a bit-exact round trip.
std::string format_double(double x);
double parse_double(std::string_view s);

std::string sha256_hex(std::string_view data);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, std::string_view text);

/// Row-major CSV, no header.
std::string matrix_to_csv(const Matrix& m);
Matrix matrix_from_csv(std::string_view text);
void write_matrix_csv(const fs::path& path, const Matrix& m);
Matrix read_matrix_csv(const fs::path& path);

/// {n, mass_normalized, rows}
json graph_to_json(const SymmetricGraph& g);
SymmetricGraph graph_from_json(const json& j);

/// Header row of class ids, then one row per labeled sample.
std::string posterior_to_csv(const PosteriorMatrix& y);
PosteriorMatrix posterior_from_csv(std::string_view text);

/// {r, gamma, alpha, beta}
json noise_to_json(const NoiseModel& nm);
NoiseModel noise_from_json(const json& j);

json scenario_to_json(const ScenarioConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
ScenarioConfig scenario_from_json(const json& j);

/// aug_graph.csv, aug_dist.csv, labels.csv, layout.csv and manifest.json
/// (config echo plus a SHA-256 over the four CSV files).
void save_world(const fs::path& dir, const World& w, const ScenarioConfig& cfg);
/// Regenerates the world from the manifest config and checks the content hash.
World load_world(const fs::path& dir, ScenarioConfig* cfg_out = nullptr);
std::string world_content_hash(const World& w);

/// <stem>.csv with F and <stem>.json with {n, k, loss, iters, seed}.
void save_factor(const fs::path& stem, const TrainOutcome& out, std::uint64_t seed);

json bound_report_to_json(const BoundReport& rep);
json eval_report_to_json(const EvalReport& rep);

/// Non-finite doubles become the strings "inf", "-inf" and "nan".
json number(double x);

}  // namespace wscl::io
