#pragma once

#include <string>
#include <vector>

#include "rashomon/config.hpp"
#include "rashomon/dataset.hpp"
#include "rashomon/selection.hpp"
#include "rashomon/sweep.hpp"

namespace rashomon {

// Train/test views of the configured dataset. With test_dataset set the two
// files are used verbatim; otherwise a stratified split of `full`.
struct LoadedData {
  Dataset full;
  Dataset train;
  Dataset test;
};

LoadedData load_and_split(const AuditConfig& cfg);

struct CorrelationRow {
  std::string model_id;
  std::size_t n = 0;
  double r = 0.0;
  double p = 1.0;
  double p_cor = 1.0;
  double power = 0.0;
  std::string error;  // nonempty: the test could not run; excluded from BH
};

// Spearman(size, value) per point set, BH-corrected within the table,
// post-hoc power at the given alpha. |r| = 1 reports the power limit 1.
std::vector<CorrelationRow> correlation_table(const std::vector<CorrelationPoints>& points,
                                              double alpha);

struct AuditOutcome {
  int exit_code = 0;  // 0 clean, 2 completed with warnings
  std::string run_dir;
  std::vector<std::string> warnings;
};

// Selection only: writes config.resolved.json and selection.json.
AuditOutcome run_select(const AuditConfig& cfg, const std::string& out_dir,
                        std::size_t workers = 1);

// Full pipeline: selection, sweep, series, correlation tables, summary.
// Writes config.resolved.json, selection.json, cells.jsonl, series.json,
// correlations.json, summary.json into out_dir.
AuditOutcome run_audit(const AuditConfig& cfg, const std::string& out_dir,
                       std::size_t workers = 1);

// Renders an existing run directory to delimited-text tables and a plot-data
// bundle under <out_dir>; recomputes nothing.
AuditOutcome run_report(const std::string& run_dir, const std::string& out_dir);

// Recomputes one sweep cell of an existing run directory.
SweepCell run_single_cell(const std::string& run_dir, const std::string& model_id,
                          std::size_t size, std::size_t fold);

// JSON record for one cell, exactly the cells.jsonl line format.
std::string cell_record_json(const SweepCell& cell);

}  // namespace rashomon
