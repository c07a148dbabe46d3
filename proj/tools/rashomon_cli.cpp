// Command-line front end: select / audit / report / cell.
//
// Flags mirror the audit configuration; precedence is defaults < --config
// file < explicit flags. Worker count comes from RASHOMON_WORKERS (default:
// hardware concurrency); it never changes results, only wall time.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rashomon/config.hpp"
#include "rashomon/errors.hpp"
#include "rashomon/report.hpp"

namespace {

std::size_t worker_count() {
  if (const char* env = std::getenv("RASHOMON_WORKERS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid RASHOMON_WORKERS='" << env << "'\n";
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

struct CommonFlags {
  std::string config_file;
  std::string dataset;
  std::string label;
  std::string test_dataset;
  double test_fraction = 0.0;
  bool impute = false;
  bool one_hot = false;
  std::uint64_t seed = 0;
  std::size_t folds = 0;
  double epsilon = 0.0;
  std::vector<std::size_t> grid;
  bool independent_subsamples = false;
  std::vector<std::string> families;
  std::size_t budget = 0;
  bool no_bagging = false;
  std::size_t background = 0;
  bool background_mean = false;
  std::size_t nsamples = 0;
  std::size_t enumeration_threshold = 0;
  std::size_t max_instances = 0;
  std::vector<std::size_t> top_j;
  std::string mas_mode;
  bool fold_paired_inter = false;
  double alpha = 0.0;
};

void add_config_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_file, "JSON config file; flags override it");
  cmd->add_option("--dataset", f.dataset, "CSV file with a binary label column");
  cmd->add_option("--label", f.label, "label column name (default: label)");
  cmd->add_option("--test-dataset", f.test_dataset,
                  "separate test CSV; otherwise a stratified split is made");
  cmd->add_option("--test-fraction", f.test_fraction,
                  "held-out fraction when splitting (default: 0.2)");
  cmd->add_flag("--impute", f.impute, "mean-impute missing feature values");
  cmd->add_flag("--one-hot", f.one_hot, "one-hot encode categorical columns");
  cmd->add_option("--seed", f.seed, "master seed (default: 1)");
  cmd->add_option("--folds", f.folds, "cross-validation folds (default: 10)");
  cmd->add_option("--epsilon", f.epsilon, "Rashomon loss tolerance (default: 0.05)");
  cmd->add_option("--grid", f.grid, "sample sizes; default: powers of two up to the pool")
      ->delimiter(',');
  cmd->add_flag("--independent-subsamples", f.independent_subsamples,
                "draw each size independently instead of nested subsets");
  cmd->add_option("--families", f.families, "candidate families (default: all)")
      ->delimiter(',');
  cmd->add_option("--budget", f.budget, "random-search draws per family (default: 20)");
  cmd->add_flag("--no-bagging", f.no_bagging, "skip the bagging ensemble");
  cmd->add_option("--background", f.background, "SHAP background rows B (default: 16)");
  cmd->add_flag("--background-mean", f.background_mean,
                "single per-feature-mean background row");
  cmd->add_option("--nsamples", f.nsamples,
                  "sampled-mode coalition budget (default: 2048)");
  cmd->add_option("--enumeration-threshold", f.enumeration_threshold,
                  "max K for exact coalition enumeration (default: 12)");
  cmd->add_option("--max-instances", f.max_instances,
                  "explained test rows, 0 = all (default: 0)");
  cmd->add_option("--top-j", f.top_j, "top-j list (default: 1,3,5)")->delimiter(',');
  cmd->add_option("--mas-mode", f.mas_mode, "wcossim weights: group_mean|scalar");
  cmd->add_flag("--fold-paired-inter", f.fold_paired_inter,
                "pair inter-model agreement per fold instead of fold averages");
  cmd->add_option("--alpha", f.alpha, "significance level (default: 0.05)");
}

rashomon::AuditConfig build_config(const CLI::App* cmd, const CommonFlags& f) {
  rashomon::AuditConfig cfg;
  if (!f.config_file.empty()) cfg = rashomon::load_config_file(f.config_file);

  auto set = [&](const char* flag) { return cmd->count(flag) > 0; };
  if (set("--dataset")) cfg.dataset = f.dataset;
  if (set("--label")) cfg.label = f.label;
  if (set("--test-dataset")) cfg.test_dataset = f.test_dataset;
  if (set("--test-fraction")) cfg.test_fraction = f.test_fraction;
  if (set("--impute")) cfg.impute = f.impute;
  if (set("--one-hot")) cfg.one_hot = f.one_hot;
  if (set("--seed")) cfg.seed = f.seed;
  if (set("--folds")) cfg.folds = f.folds;
  if (set("--epsilon")) cfg.epsilon = f.epsilon;
  if (set("--grid")) cfg.grid = f.grid;
  if (set("--independent-subsamples")) cfg.nested = !f.independent_subsamples;
  if (set("--families")) {
    cfg.families.clear();
    for (const auto& name : f.families) {
      cfg.families.push_back(rashomon::family_from_name(name));
    }
  }
  if (set("--budget")) cfg.budget = f.budget;
  if (set("--no-bagging")) cfg.bagging = !f.no_bagging;
  if (set("--background")) cfg.shap.background = f.background;
  if (set("--background-mean")) cfg.shap.background_mean = f.background_mean;
  if (set("--nsamples")) cfg.shap.nsamples = f.nsamples;
  if (set("--enumeration-threshold")) {
    cfg.shap.enumeration_threshold = f.enumeration_threshold;
  }
  if (set("--max-instances")) cfg.shap.max_instances = f.max_instances;
  if (set("--top-j")) cfg.similarity.top_j = f.top_j;
  if (set("--mas-mode")) cfg.similarity.mas_mode = rashomon::mas_mode_from_name(f.mas_mode);
  if (set("--fold-paired-inter")) cfg.similarity.fold_paired_inter = f.fold_paired_inter;
  if (set("--alpha")) cfg.alpha = f.alpha;
  return cfg;
}

void print_outcome(const rashomon::AuditOutcome& outcome) {
  for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << outcome.run_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explanation-reliability audit across a Rashomon set of classifiers"};
  app.require_subcommand(1);

  CommonFlags select_flags, audit_flags;
  std::string select_out = "select-run";
  std::string audit_out = "audit-run";

  CLI::App* cmd_select =
      app.add_subcommand("select", "rank model families by CV kappa, keep the top 3");
  add_config_flags(cmd_select, select_flags);
  cmd_select->add_option("--out", select_out, "output directory");

  CLI::App* cmd_audit =
      app.add_subcommand("audit", "full sweep: select, train, explain, correlate");
  add_config_flags(cmd_audit, audit_flags);
  cmd_audit->add_option("--out", audit_out, "output directory");

  std::string report_run, report_out;
  CLI::App* cmd_report =
      app.add_subcommand("report", "render a run directory to CSV tables and plot data");
  cmd_report->add_option("--run", report_run, "run directory")->required();
  cmd_report->add_option("--out", report_out, "output directory (default: <run>/report)");

  std::string cell_run, cell_model;
  std::size_t cell_size = 0, cell_fold = 0;
  CLI::App* cmd_cell =
      app.add_subcommand("cell", "recompute one sweep cell of an existing run");
  cmd_cell->add_option("--run", cell_run, "run directory")->required();
  cmd_cell->add_option("--model", cell_model, "model id (family name or 'bagging')")
      ->required();
  cmd_cell->add_option("--size", cell_size, "sample size")->required();
  cmd_cell->add_option("--fold", cell_fold, "fold id")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_select->parsed()) {
      const auto cfg = build_config(cmd_select, select_flags);
      const auto outcome = rashomon::run_select(cfg, select_out, worker_count());
      print_outcome(outcome);
      return outcome.exit_code;
    }
    if (cmd_audit->parsed()) {
      const auto cfg = build_config(cmd_audit, audit_flags);
      const auto outcome = rashomon::run_audit(cfg, audit_out, worker_count());
      print_outcome(outcome);
      return outcome.exit_code;
    }
    if (cmd_report->parsed()) {
      const std::string out = report_out.empty() ? report_run + "/report" : report_out;
      const auto outcome = rashomon::run_report(report_run, out);
      for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << out << "\n";
      return outcome.exit_code;
    }
    if (cmd_cell->parsed()) {
      const auto cell =
          rashomon::run_single_cell(cell_run, cell_model, cell_size, cell_fold);
      std::cout << rashomon::cell_record_json(cell) << "\n";
      return cell.ok ? 0 : 2;
    }
  } catch (const rashomon::Error& e) {
    std::cerr << "error [" << rashomon::error_code_name(e.code()) << "]: " << e.what()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
