#pragma once

#include <cstddef>
#include <span>

namespace rashomon {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
};

struct PerfRecord {
  double acc = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
  double kappa = 0.0;
};

ConfusionCounts confusion(std::span<const int> y_true, std::span<const int> y_pred);

double kappa(const ConfusionCounts& c);

// acc/F1/MCC/kappa with degenerate denominators mapped to 0.
PerfRecord score(const ConfusionCounts& c);

}  // namespace rashomon
