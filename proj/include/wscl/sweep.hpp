#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wscl/synthetic.hpp"

namespace wscl {

struct SweepConfig {
  ScenarioConfig scenario;
  std::vector<double> theta_grid;
  std::vector<double> gamma_grid;
  std::vector<int> k_grid;
  std::uint64_t master_seed = 0;
  int replicates = 1;
  std::string output_dir;  ///< empty keeps everything in memory
  int threads = 1;
  double ridge = 1e-8;
};

/// Checks the invariants and returns a copy with 0 and 1 injected into the
/// theta grid, which is then sorted and deduplicated. Throws ConfigInvalid.
SweepConfig normalized(const SweepConfig& cfg);

SweepConfig sweep_config_from_json(const nlohmann::json& j);
nlohmann::json sweep_config_to_json(const SweepConfig& cfg);

struct SweepRow {
  int replicate = 0;
  std::uint64_t seed = 0;  ///< world seed
  double gamma = 0.0;
  double theta = 0.0;
  int k = 0;
  double error = 0.0;  ///< per-augmentation error E
  double vote_error = 0.0;
  double delta_u = 0.0;
  double delta_s = 0.0;
  double probe_norm = 0.0;
  double norm_cap = 0.0;
  double bound = 0.0;  ///< NaN where the bound does not apply
  bool gate = false;
};

struct SummaryRow {
  double gamma = 0.0;
  int k = 0;
  double best_theta = 0.0;  ///< argmin of the replicate-mean error, ties to the larger theta
  double err_theta0 = 0.0;
  double err_theta1 = 0.0;
  double min_over_grid = 0.0;
  double baseline_gap = 0.0;  ///< min_over_grid - min(err_theta0, err_theta1)
  double mean_replicate_gap = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SummaryRow> summary;
  std::string results_csv;
  std::string summary_csv;
  int cells_total = 0;
  int cells_resumed = 0;
  double seconds = 0.0;
};

struct SweepOptions {
  /// Stop after computing this many new cells (negative: no limit). Used to
  /// exercise resumption.
  int max_new_cells = -1;
};

extern const char* const kResultsHeader;
extern const char* const kSummaryHeader;

/// Rows of one (replicate, gamma index) cell in canonical order.
std::vector<SweepRow> run_cell(const SweepConfig& cfg, int replicate, int gamma_index);

std::string rows_to_csv(const std::vector<SweepRow>& rows, bool header);
std::vector<SweepRow> rows_from_csv(const std::string& text);

std::vector<SummaryRow> summarize(const SweepConfig& cfg, const std::vector<SweepRow>& rows);
std::string summary_to_csv(const std::vector<SummaryRow>& summary);

/// Runs every cell, resuming from cell files under output_dir/cells, and
/// writes results.csv, summary.csv and manifest.json when output_dir is set.
/// When max_new_cells stops the run early, the result holds only the cells
/// computed so far and no final files are written.
SweepResult run_sweep(const SweepConfig& cfg, const SweepOptions& opts = {});

/// fig1_baseline.csv, fig2a_optimal_theta.csv, bounds.csv and table1_k.csv.
void emit_plot_data(const SweepResult& result, const std::filesystem::path& dir);

}  // namespace wscl
