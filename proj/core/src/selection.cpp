#include "rashomon/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>

#include "rashomon/errors.hpp"
#include "rashomon/metrics.hpp"
#include "rashomon/parallel.hpp"
#include "rashomon/rng.hpp"

namespace rashomon {

namespace {

// CV of one concrete spec under the shared fold plan. Unlike the search loop,
// this keeps per-fold scores and surfaces training warnings.
RankedCandidate evaluate_spec(const ModelSpec& spec, const Matrix& X,
                              const std::vector<int>& y, const FoldPlan& folds) {
  RankedCandidate c;
  c.spec = spec;
  std::set<std::string> warned;
  for (std::size_t fold = 0; fold < folds.k; ++fold) {
    std::vector<std::size_t> tr, va;
    for (std::size_t r = 0; r < X.rows(); ++r) {
      (folds.assignments[r] == fold ? va : tr).push_back(r);
    }
    if (va.empty()) continue;
    std::vector<int> y_tr, y_va;
    for (std::size_t r : tr) y_tr.push_back(y[r]);
    for (std::size_t r : va) y_va.push_back(y[r]);
    TrainedModel m = train(spec, X.take_rows(tr), y_tr);
    for (const auto& w : m.warnings) warned.insert(w);
    std::vector<int> pred = m.predict(X.take_rows(va));
    c.fold_kappas.push_back(kappa(confusion(y_va, pred)));
  }
  if (c.fold_kappas.empty()) {
    throw Error(ErrorCode::TooFewInstances, "no scorable folds");
  }
  double sum = 0.0;
  for (double v : c.fold_kappas) sum += v;
  c.mean_kappa = sum / static_cast<double>(c.fold_kappas.size());
  double ss = 0.0;
  for (double v : c.fold_kappas) {
    double d = v - c.mean_kappa;
    ss += d * d;
  }
  c.sd_kappa = std::sqrt(ss / static_cast<double>(c.fold_kappas.size()));
  c.warnings.assign(warned.begin(), warned.end());
  return c;
}

std::uint64_t family_seed(std::uint64_t seed, Family f) {
  return mix_seed(seed, fnv1a(family_name(f)));
}

}  // namespace

ModelSpec baseline_lr_spec(std::uint64_t master_seed) {
  ModelSpec spec;
  spec.family = Family::lr;
  for (const auto& p : family_schema(Family::lr)) {
    spec.hyperparams[p.name] = p.fallback;
  }
  spec.seed = mix_seed(master_seed, fnv1a("baseline-lr"));
  return spec;
}

SelectionResult select(const Dataset& d, const std::vector<Family>& families,
                       const FoldPlan& folds, std::size_t budget, std::uint64_t seed,
                       std::size_t workers) {
  if (families.size() < 3) {
    throw Error(ErrorCode::TooFewModels, "selection needs at least 3 families");
  }
  {
    std::set<Family> uniq(families.begin(), families.end());
    if (uniq.size() != families.size()) {
      throw Error(ErrorCode::InvalidArgument, "duplicate family in selection list");
    }
  }
  if (folds.assignments.size() != d.n()) {
    throw Error(ErrorCode::LengthMismatch, "fold plan does not match dataset");
  }

  struct Slot {
    bool ok = false;
    RankedCandidate cand;
    std::string fail;
  };
  std::vector<Slot> slots(families.size());

  parallel_for(families.size(), workers, [&](std::size_t i) {
    const Family f = families[i];
    try {
      ModelSpec best =
          random_search(f, d.features, d.labels, budget, folds, family_seed(seed, f));
      slots[i].cand = evaluate_spec(best, d.features, d.labels, folds);
      slots[i].ok = true;
    } catch (const Error& e) {
      slots[i].fail = e.what();
    }
  });

  SelectionResult result;
  for (std::size_t i = 0; i < families.size(); ++i) {
    if (slots[i].ok) {
      result.ranked.push_back(std::move(slots[i].cand));
    } else {
      result.failed_families.push_back(std::string(family_name(families[i])) + ": " +
                                       slots[i].fail);
    }
  }
  if (result.ranked.empty()) {
    throw Error(ErrorCode::AllFamiliesFailed, "every candidate family failed CV");
  }

  std::sort(result.ranked.begin(), result.ranked.end(),
            [](const RankedCandidate& a, const RankedCandidate& b) {
              if (a.mean_kappa != b.mean_kappa) return a.mean_kappa > b.mean_kappa;
              if (a.sd_kappa != b.sd_kappa) return a.sd_kappa < b.sd_kappa;
              return std::strcmp(family_name(a.spec.family),
                                 family_name(b.spec.family)) < 0;
            });

  const std::size_t take = std::min<std::size_t>(3, result.ranked.size());
  for (std::size_t i = 0; i < take; ++i) result.top3.push_back(result.ranked[i].spec);

  // Baseline: plain lr with schema defaults, never tuned.
  const ModelSpec baseline_spec = baseline_lr_spec(seed);
  try {
    result.baseline = evaluate_spec(baseline_spec, d.features, d.labels, folds);
  } catch (const Error& e) {
    result.baseline.spec = baseline_spec;
    result.baseline.mean_kappa = std::numeric_limits<double>::quiet_NaN();
    result.baseline.sd_kappa = std::numeric_limits<double>::quiet_NaN();
    result.baseline.warnings.push_back(std::string("baseline-failed: ") + e.what());
  }
  return result;
}

RashomonSet rashomon_membership(const SelectionResult& sel, double epsilon) {
  if (epsilon < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must be >= 0");
  }
  if (sel.ranked.empty()) {
    throw Error(ErrorCode::TooFewModels, "selection has no ranked candidates");
  }
  RashomonSet set;
  set.epsilon = epsilon;
  set.reference_loss = 1.0 - sel.ranked.front().mean_kappa;
  const double cutoff = set.reference_loss + epsilon;
  std::size_t kept_of_top3 = 0;
  for (std::size_t i = 0; i < sel.ranked.size(); ++i) {
    const double loss = 1.0 - sel.ranked[i].mean_kappa;
    if (loss <= cutoff) {
      set.members.push_back(sel.ranked[i].spec);
      if (i < sel.top3.size()) ++kept_of_top3;
    }
  }
  set.top3_subset = kept_of_top3 == sel.top3.size();
  return set;
}

}  // namespace rashomon
