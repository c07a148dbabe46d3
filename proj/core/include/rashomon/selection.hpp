#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rashomon/dataset.hpp"
#include "rashomon/models.hpp"

namespace rashomon {

// One family's best configuration after random search, with its CV score.
struct RankedCandidate {
  ModelSpec spec;
  double mean_kappa = 0.0;
  double sd_kappa = 0.0;
  std::vector<double> fold_kappas;
  std::vector<std::string> warnings;
};

struct SelectionResult {
  std::vector<RankedCandidate> ranked;   // descending by mean kappa
  std::vector<ModelSpec> top3;           // first three of ranked
  RankedCandidate baseline;              // lr, always evaluated
  std::vector<std::string> failed_families;
};

struct RashomonSet {
  double reference_loss = 0.0;  // L(f*) = 1 - best mean kappa
  double epsilon = 0.0;
  std::vector<ModelSpec> members;
  bool top3_subset = true;  // false => selection proceeded outside the set
};

// The untuned logistic-regression reference configuration: schema defaults,
// seed derived from the master seed.
ModelSpec baseline_lr_spec(std::uint64_t master_seed);

// Benchmarks every family with random_search under a shared fold plan, ranks
// by mean CV kappa (ties: sd ascending, then family name), keeps the top
// three, and reports the lr baseline separately. Families whose every
// candidate fails to train are dropped and listed in failed_families.
SelectionResult select(const Dataset& d, const std::vector<Family>& families,
                       const FoldPlan& folds, std::size_t budget, std::uint64_t seed,
                       std::size_t workers = 1);

// Membership under L(f) = 1 - mean CV kappa: keeps every ranked candidate
// with L(f) <= L(f*) + epsilon. Never rejects the top-3; a top-3 model that
// falls outside the set only clears top3_subset.
RashomonSet rashomon_membership(const SelectionResult& sel, double epsilon);

}  // namespace rashomon
