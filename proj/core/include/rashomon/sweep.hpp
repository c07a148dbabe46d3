#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rashomon/config.hpp"
#include "rashomon/dataset.hpp"
#include "rashomon/metrics.hpp"
#include "rashomon/models.hpp"
#include "rashomon/shap.hpp"
#include "rashomon/similarity.hpp"

namespace rashomon {

// One (model, sample size, fold) coordinate of the sweep. `status` is "ok",
// a semicolon-joined warning tag list, or "failed: <reason>".
struct SweepCell {
  std::string model_id;  // family name of a top-3 member, or "bagging"
  std::size_t size = 0;
  std::size_t fold = 0;
  std::uint64_t derived_seed = 0;
  std::size_t train_rows = 0;
  bool ok = false;
  std::string status = "ok";
  PerfRecord perf;
  GlobalImportance importance;
  Matrix attributions;  // explained test rows x K
  double base = 0.0;
};

struct SweepResult {
  std::vector<std::string> model_ids;  // top-3 order, then "bagging" if enabled
  std::vector<std::size_t> sizes;      // ascending
  std::size_t folds = 0;
  std::vector<std::size_t> explained_rows;  // test-row indices, ascending
  Background background;
  std::vector<SweepCell> cells;  // model-major, then size, then fold
};

std::uint64_t cell_seed(std::uint64_t master, const std::string& model_id,
                        std::size_t size, std::size_t fold);

// Full sweep: every (model, size, fold) trained on the fold-training portion
// of the size-s subsample of `train`, scored on all of `test`, explained on
// the run's shared explained-row subset. Output is ordered by coordinates and
// identical for every worker count. Per-cell failures are recorded, never
// thrown.
SweepResult run_sweep(const Dataset& train, const Dataset& test,
                      const std::vector<ModelSpec>& top3, const AuditConfig& cfg,
                      std::size_t workers = 1);

// Recomputes one coordinate; equals the matching cell of the full sweep.
SweepCell run_cell(const Dataset& train, const Dataset& test,
                   const std::vector<ModelSpec>& top3, const AuditConfig& cfg,
                   const std::string& model_id, std::size_t size, std::size_t fold);

struct AgreementPoint {
  std::size_t size = 0;
  double value = 0.0;
};

struct AgreementSeries {
  std::string kind;      // intra | topj | inter | convergence | bagging-convergence | dispersion
  std::string model_id;  // empty for inter and dispersion
  std::size_t j = 0;     // topj series only
  std::vector<AgreementPoint> points;  // ascending size
};

// Per size: wcossim_group over the model's per-fold importance vectors.
// Defined at sizes with >= 2 successful cells.
AgreementSeries intra_agreement(const SweepResult& sweep, const std::string& model_id,
                                MasMode mode);

// Per size and j: mean pairwise top-j overlap across the model's folds.
std::vector<AgreementSeries> intra_top_j(const SweepResult& sweep,
                                         const std::string& model_id,
                                         const std::vector<std::size_t>& js);

// Per size: agreement across the top-3 models (bagging excluded), each model
// represented by its fold-averaged importance; fold_paired instead averages
// the per-fold across-model agreement.
AgreementSeries inter_agreement(const SweepResult& sweep, MasMode mode,
                                bool fold_paired);

// Consensus target: per-model fold-averaged importance at the largest size,
// top-3 only, averaged per feature.
ConsensusVector sweep_consensus(const SweepResult& sweep);

// One series per explained model (bagging last when present): per size,
// wcossim between the model's fold-averaged importance and the consensus.
std::vector<AgreementSeries> convergence_to_consensus(const SweepResult& sweep,
                                                      const ConsensusVector& target,
                                                      MasMode mode);

// Per size: standard deviation of the fold-pair wcossim values pooled over
// the top-3 models. The low-sample-variability check reads this series.
AgreementSeries dispersion_series(const SweepResult& sweep, MasMode mode);

// Correlation inputs. intra: one (size, value) point per successful fold,
// value = mean pairwise wcossim of that fold's importance against the other
// folds at the same size. convergence: the series points themselves.
struct CorrelationPoints {
  std::string model_id;
  std::vector<double> sizes;
  std::vector<double> values;
};

std::vector<CorrelationPoints> intra_points(const SweepResult& sweep, MasMode mode);
std::vector<CorrelationPoints> convergence_points(const SweepResult& sweep,
                                                  const ConsensusVector& target,
                                                  MasMode mode);

}  // namespace rashomon
