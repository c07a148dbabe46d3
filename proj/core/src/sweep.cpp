#include "rashomon/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rashomon/errors.hpp"
#include "rashomon/parallel.hpp"
#include "rashomon/rng.hpp"

namespace rashomon {

namespace {

struct SweepContext {
  const Dataset* train = nullptr;
  const Dataset* test = nullptr;
  std::vector<std::size_t> pool;  // all train positions
  FoldPlan folds;
  std::vector<std::size_t> sizes;
  std::vector<std::string> model_ids;
  Background bg;
  std::vector<std::size_t> explained_rows;
  Matrix explained_X;
  std::uint64_t subsample_seed = 0;
};

SweepContext make_context(const Dataset& train, const Dataset& test,
                          const std::vector<ModelSpec>& top3, const AuditConfig& cfg) {
  if (top3.empty()) throw Error(ErrorCode::TooFewModels, "sweep needs selected models");
  {
    std::set<std::string> names;
    for (const auto& spec : top3) {
      if (!names.insert(family_name(spec.family)).second) {
        throw Error(ErrorCode::InvalidArgument, "duplicate family among selected models");
      }
    }
  }
  if (train.k() != test.k()) {
    throw Error(ErrorCode::DimensionMismatch, "train and test disagree on feature count");
  }

  SweepContext ctx;
  ctx.train = &train;
  ctx.test = &test;
  ctx.pool.resize(train.n());
  for (std::size_t i = 0; i < ctx.pool.size(); ++i) ctx.pool[i] = i;
  ctx.folds = make_folds(train.n(), train.labels, cfg.folds,
                         mix_seed(cfg.seed, fnv1a("folds")));
  ctx.sizes = cfg.grid.empty() ? make_grid(train.n()).sizes : cfg.grid;
  for (std::size_t s : ctx.sizes) {
    if (s > train.n()) {
      throw Error(ErrorCode::SizeTooLarge, "grid size " + std::to_string(s) +
                                               " exceeds training pool " +
                                               std::to_string(train.n()));
    }
  }
  for (const auto& spec : top3) ctx.model_ids.push_back(family_name(spec.family));
  if (cfg.bagging) ctx.model_ids.push_back("bagging");

  ctx.bg = make_background(train.features, cfg.shap.background,
                           mix_seed(cfg.seed, fnv1a("background")),
                           cfg.shap.background_mean);

  const std::size_t cap = cfg.shap.max_instances;
  if (cap == 0 || cap >= test.n()) {
    ctx.explained_rows.resize(test.n());
    for (std::size_t i = 0; i < test.n(); ++i) ctx.explained_rows[i] = i;
  } else {
    Rng rng(mix_seed(cfg.seed, fnv1a("explained")));
    ctx.explained_rows = rng.sample_without_replacement(test.n(), cap);
    std::sort(ctx.explained_rows.begin(), ctx.explained_rows.end());
  }
  ctx.explained_X = test.features.take_rows(ctx.explained_rows);
  ctx.subsample_seed = mix_seed(cfg.seed, fnv1a("subsample"));
  return ctx;
}

SweepCell compute_cell(const SweepContext& ctx, const std::vector<ModelSpec>& top3,
                       const AuditConfig& cfg, const std::string& model_id,
                       std::size_t size, std::size_t fold) {
  SweepCell cell;
  cell.model_id = model_id;
  cell.size = size;
  cell.fold = fold;
  cell.derived_seed = cell_seed(cfg.seed, model_id, size, fold);
  try {
    const std::vector<std::size_t> subset =
        subsample(*ctx.train, ctx.pool, size, ctx.subsample_seed, cfg.nested);
    std::vector<std::size_t> rows;
    rows.reserve(subset.size());
    for (std::size_t p : subset) {
      if (ctx.folds.assignments[p] != fold) rows.push_back(p);
    }
    cell.train_rows = rows.size();
    const Matrix X_tr = ctx.train->features.take_rows(rows);
    std::vector<int> y_tr;
    y_tr.reserve(rows.size());
    for (std::size_t p : rows) y_tr.push_back(ctx.train->labels[p]);

    std::vector<std::string> warnings;
    TrainedModel single;
    BaggingEnsemble ensemble;
    const Predictor* predictor = nullptr;
    if (model_id == "bagging") {
      std::vector<TrainedModel> members;
      for (const auto& member : top3) {
        ModelSpec spec = member;
        spec.seed = cell_seed(cfg.seed, family_name(member.family), size, fold);
        members.push_back(train(spec, X_tr, y_tr));
        for (const auto& w : members.back().warnings) warnings.push_back(w);
      }
      ensemble = bag(std::move(members));
      predictor = &ensemble;
    } else {
      const ModelSpec* found = nullptr;
      for (const auto& spec : top3) {
        if (model_id == family_name(spec.family)) found = &spec;
      }
      if (!found) {
        throw Error(ErrorCode::InvalidArgument,
                    "model '" + model_id + "' is not among the selected models");
      }
      ModelSpec spec = *found;
      spec.seed = cell.derived_seed;
      single = train(spec, X_tr, y_tr);
      warnings = single.warnings;
      predictor = &single;
    }

    const std::vector<int> pred = predictor->predict(ctx.test->features);
    cell.perf = score(confusion(ctx.test->labels, pred));

    ShapConfig sc;
    sc.nsamples = cfg.shap.nsamples;
    sc.enumeration_threshold = cfg.shap.enumeration_threshold;
    sc.seed = mix_seed(cell.derived_seed, fnv1a("shap"));
    Attribution a = explain(*predictor, ctx.explained_X, ctx.bg, sc);
    cell.importance = aggregate(a);
    cell.importance.model_id = model_id;
    cell.importance.sample_size = size;
    cell.importance.fold_id = fold;
    cell.attributions = std::move(a.values);
    cell.base = a.base;

    if (!warnings.empty()) {
      std::set<std::string> uniq(warnings.begin(), warnings.end());
      std::string joined;
      for (const auto& w : uniq) {
        if (!joined.empty()) joined += ";";
        joined += w;
      }
      cell.status = joined;
    }
    cell.ok = true;
  } catch (const Error& e) {
    cell.ok = false;
    cell.status = std::string("failed: ") + e.what();
  }
  return cell;
}

// ---- series helpers ----------------------------------------------------

std::size_t cell_index(const SweepResult& sweep, std::size_t model, std::size_t size_i,
                       std::size_t fold) {
  return (model * sweep.sizes.size() + size_i) * sweep.folds + fold;
}

std::size_t model_index(const SweepResult& sweep, const std::string& model_id) {
  for (std::size_t m = 0; m < sweep.model_ids.size(); ++m) {
    if (sweep.model_ids[m] == model_id) return m;
  }
  throw Error(ErrorCode::MissingCells, "no cells for model '" + model_id + "'");
}

// Successful importance vectors of one model at one size.
std::vector<GlobalImportance> ok_importances(const SweepResult& sweep, std::size_t model,
                                             std::size_t size_i) {
  std::vector<GlobalImportance> out;
  for (std::size_t f = 0; f < sweep.folds; ++f) {
    const SweepCell& c = sweep.cells[cell_index(sweep, model, size_i, f)];
    if (c.ok) out.push_back(c.importance);
  }
  return out;
}

bool fold_average(const SweepResult& sweep, std::size_t model, std::size_t size_i,
                  GlobalImportance& out) {
  const auto vecs = ok_importances(sweep, model, size_i);
  if (vecs.empty()) return false;
  out.per_feature.assign(vecs.front().per_feature.size(), 0.0);
  for (const auto& v : vecs) {
    for (std::size_t j = 0; j < out.per_feature.size(); ++j) {
      out.per_feature[j] += v.per_feature[j];
    }
  }
  for (auto& x : out.per_feature) x /= static_cast<double>(vecs.size());
  out.model_id = sweep.model_ids[model];
  out.sample_size = sweep.sizes[size_i];
  out.fold_id = 0;
  return true;
}

double pair_wcossim(const GlobalImportance& a, const GlobalImportance& b, MasMode mode) {
  const GlobalImportance pair[2] = {a, b};
  const auto w = weight_vectors(std::span<const GlobalImportance>(pair, 2), mode);
  return wcossim(w[0], w[1]);
}

std::size_t explained_model_count(const SweepResult& sweep) {
  std::size_t n = sweep.model_ids.size();
  if (n > 0 && sweep.model_ids.back() == "bagging") --n;
  return n;
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t master, const std::string& model_id,
                        std::size_t size, std::size_t fold) {
  std::uint64_t h = mix_seed(master, fnv1a(model_id));
  h = mix_seed(h, static_cast<std::uint64_t>(size));
  return mix_seed(h, static_cast<std::uint64_t>(fold));
}

SweepResult run_sweep(const Dataset& train, const Dataset& test,
                      const std::vector<ModelSpec>& top3, const AuditConfig& cfg,
                      std::size_t workers) {
  const SweepContext ctx = make_context(train, test, top3, cfg);

  SweepResult result;
  result.model_ids = ctx.model_ids;
  result.sizes = ctx.sizes;
  result.folds = cfg.folds;
  result.explained_rows = ctx.explained_rows;
  result.background = ctx.bg;
  result.cells.resize(ctx.model_ids.size() * ctx.sizes.size() * cfg.folds);

  parallel_for(result.cells.size(), workers, [&](std::size_t i) {
    const std::size_t fold = i % cfg.folds;
    const std::size_t size_i = (i / cfg.folds) % ctx.sizes.size();
    const std::size_t model = i / (cfg.folds * ctx.sizes.size());
    result.cells[i] = compute_cell(ctx, top3, cfg, ctx.model_ids[model],
                                   ctx.sizes[size_i], fold);
  });
  return result;
}

SweepCell run_cell(const Dataset& train, const Dataset& test,
                   const std::vector<ModelSpec>& top3, const AuditConfig& cfg,
                   const std::string& model_id, std::size_t size, std::size_t fold) {
  const SweepContext ctx = make_context(train, test, top3, cfg);
  if (std::find(ctx.model_ids.begin(), ctx.model_ids.end(), model_id) ==
      ctx.model_ids.end()) {
    throw Error(ErrorCode::InvalidArgument, "model '" + model_id + "' not in this run");
  }
  if (std::find(ctx.sizes.begin(), ctx.sizes.end(), size) == ctx.sizes.end()) {
    throw Error(ErrorCode::InvalidArgument,
                "size " + std::to_string(size) + " is not a grid size of this run");
  }
  if (fold >= cfg.folds) {
    throw Error(ErrorCode::InvalidArgument, "fold out of range");
  }
  return compute_cell(ctx, top3, cfg, model_id, size, fold);
}

AgreementSeries intra_agreement(const SweepResult& sweep, const std::string& model_id,
                                MasMode mode) {
  const std::size_t m = model_index(sweep, model_id);
  AgreementSeries series;
  series.kind = "intra";
  series.model_id = model_id;
  for (std::size_t si = 0; si < sweep.sizes.size(); ++si) {
    const auto vecs = ok_importances(sweep, m, si);
    if (vecs.size() < 2) continue;
    series.points.push_back({sweep.sizes[si], wcossim_group(vecs, mode)});
  }
  if (series.points.empty()) {
    throw Error(ErrorCode::MissingCells,
                "model '" + model_id + "' has no size with >= 2 successful folds");
  }
  return series;
}

std::vector<AgreementSeries> intra_top_j(const SweepResult& sweep,
                                         const std::string& model_id,
                                         const std::vector<std::size_t>& js) {
  const std::size_t m = model_index(sweep, model_id);
  std::vector<AgreementSeries> out;
  for (std::size_t j : js) {
    AgreementSeries series;
    series.kind = "topj";
    series.model_id = model_id;
    series.j = j;
    for (std::size_t si = 0; si < sweep.sizes.size(); ++si) {
      const auto vecs = ok_importances(sweep, m, si);
      if (vecs.size() < 2) continue;
      series.points.push_back({sweep.sizes[si], top_j_pairwise(vecs, j)});
    }
    if (series.points.empty()) {
      throw Error(ErrorCode::MissingCells,
                  "model '" + model_id + "' has no size with >= 2 successful folds");
    }
    out.push_back(std::move(series));
  }
  return out;
}

AgreementSeries inter_agreement(const SweepResult& sweep, MasMode mode,
                                bool fold_paired) {
  const std::size_t models = explained_model_count(sweep);
  if (models < 2) {
    throw Error(ErrorCode::MissingCells, "inter-model agreement needs >= 2 models");
  }
  AgreementSeries series;
  series.kind = "inter";
  for (std::size_t si = 0; si < sweep.sizes.size(); ++si) {
    if (fold_paired) {
      double total = 0.0;
      std::size_t counted = 0;
      for (std::size_t f = 0; f < sweep.folds; ++f) {
        std::vector<GlobalImportance> vecs;
        for (std::size_t m = 0; m < models; ++m) {
          const SweepCell& c = sweep.cells[cell_index(sweep, m, si, f)];
          if (c.ok) vecs.push_back(c.importance);
        }
        if (vecs.size() < 2) continue;
        total += wcossim_group(vecs, mode);
        ++counted;
      }
      if (counted == 0) continue;
      series.points.push_back({sweep.sizes[si], total / static_cast<double>(counted)});
    } else {
      std::vector<GlobalImportance> vecs;
      for (std::size_t m = 0; m < models; ++m) {
        GlobalImportance avg;
        if (fold_average(sweep, m, si, avg)) vecs.push_back(std::move(avg));
      }
      if (vecs.size() < 2) continue;
      series.points.push_back({sweep.sizes[si], wcossim_group(vecs, mode)});
    }
  }
  if (series.points.empty()) {
    throw Error(ErrorCode::MissingCells, "no size has >= 2 models with successful cells");
  }
  return series;
}

ConsensusVector sweep_consensus(const SweepResult& sweep) {
  if (sweep.sizes.empty()) throw Error(ErrorCode::MissingCells, "empty sweep");
  const std::size_t models = explained_model_count(sweep);
  const std::size_t last = sweep.sizes.size() - 1;
  std::vector<GlobalImportance> vecs;
  for (std::size_t m = 0; m < models; ++m) {
    GlobalImportance avg;
    if (!fold_average(sweep, m, last, avg)) {
      throw Error(ErrorCode::MissingConsensus,
                  "model '" + sweep.model_ids[m] +
                      "' has no successful cell at the largest size");
    }
    vecs.push_back(std::move(avg));
  }
  return consensus(vecs);
}

std::vector<AgreementSeries> convergence_to_consensus(const SweepResult& sweep,
                                                      const ConsensusVector& target,
                                                      MasMode mode) {
  if (target.per_feature.empty()) {
    throw Error(ErrorCode::MissingConsensus, "consensus vector is empty");
  }
  GlobalImportance goal;
  goal.per_feature = target.per_feature;
  goal.model_id = "consensus";
  goal.sample_size = target.sample_size;

  std::vector<AgreementSeries> out;
  for (std::size_t m = 0; m < sweep.model_ids.size(); ++m) {
    AgreementSeries series;
    series.kind = sweep.model_ids[m] == "bagging" ? "bagging-convergence" : "convergence";
    series.model_id = sweep.model_ids[m];
    for (std::size_t si = 0; si < sweep.sizes.size(); ++si) {
      GlobalImportance avg;
      if (!fold_average(sweep, m, si, avg)) continue;
      series.points.push_back({sweep.sizes[si], pair_wcossim(avg, goal, mode)});
    }
    if (series.points.empty()) {
      throw Error(ErrorCode::MissingCells,
                  "model '" + sweep.model_ids[m] + "' has no successful cells");
    }
    out.push_back(std::move(series));
  }
  return out;
}

AgreementSeries dispersion_series(const SweepResult& sweep, MasMode mode) {
  const std::size_t models = explained_model_count(sweep);
  AgreementSeries series;
  series.kind = "dispersion";
  for (std::size_t si = 0; si < sweep.sizes.size(); ++si) {
    std::vector<double> values;
    for (std::size_t m = 0; m < models; ++m) {
      const auto vecs = ok_importances(sweep, m, si);
      for (std::size_t a = 0; a < vecs.size(); ++a) {
        for (std::size_t b = a + 1; b < vecs.size(); ++b) {
          values.push_back(pair_wcossim(vecs[a], vecs[b], mode));
        }
      }
    }
    if (values.size() < 2) continue;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    series.points.push_back(
        {sweep.sizes[si], std::sqrt(ss / static_cast<double>(values.size()))});
  }
  if (series.points.empty()) {
    throw Error(ErrorCode::MissingCells, "no size has enough fold pairs");
  }
  return series;
}

std::vector<CorrelationPoints> intra_points(const SweepResult& sweep, MasMode mode) {
  std::vector<CorrelationPoints> out;
  for (std::size_t m = 0; m < sweep.model_ids.size(); ++m) {
    CorrelationPoints pts;
    pts.model_id = sweep.model_ids[m];
    for (std::size_t si = 0; si < sweep.sizes.size(); ++si) {
      const auto vecs = ok_importances(sweep, m, si);
      if (vecs.size() < 2) continue;
      for (std::size_t a = 0; a < vecs.size(); ++a) {
        double total = 0.0;
        for (std::size_t b = 0; b < vecs.size(); ++b) {
          if (b == a) continue;
          total += pair_wcossim(vecs[a], vecs[b], mode);
        }
        pts.sizes.push_back(static_cast<double>(sweep.sizes[si]));
        pts.values.push_back(total / static_cast<double>(vecs.size() - 1));
      }
    }
    out.push_back(std::move(pts));
  }
  return out;
}

std::vector<CorrelationPoints> convergence_points(const SweepResult& sweep,
                                                  const ConsensusVector& target,
                                                  MasMode mode) {
  std::vector<CorrelationPoints> out;
  for (const auto& series : convergence_to_consensus(sweep, target, mode)) {
    CorrelationPoints pts;
    pts.model_id = series.model_id;
    for (const auto& p : series.points) {
      pts.sizes.push_back(static_cast<double>(p.size));
      pts.values.push_back(p.value);
    }
    out.push_back(std::move(pts));
  }
  return out;
}

}  // namespace rashomon
