#include "rashomon/metrics.hpp"

#include <cmath>

#include "rashomon/errors.hpp"

namespace rashomon {

ConfusionCounts confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorCode::LengthMismatch, "y_true and y_pred lengths differ");
  }
  if (y_true.empty()) throw Error(ErrorCode::LengthMismatch, "empty inputs");
  ConfusionCounts c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    int t = y_true[i], p = y_pred[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1)) {
      throw Error(ErrorCode::NonBinaryLabel, "entries must be 0 or 1");
    }
    if (t == 1 && p == 1) ++c.tp;
    else if (t == 1 && p == 0) ++c.fn;
    else if (t == 0 && p == 1) ++c.fp;
    else ++c.tn;
  }
  return c;
}

double kappa(const ConfusionCounts& c) {
  double n = static_cast<double>(c.total());
  if (n == 0.0) throw Error(ErrorCode::InvalidArgument, "empty counts");
  double po = (static_cast<double>(c.tp) + static_cast<double>(c.tn)) / n;
  double truth_pos = (static_cast<double>(c.tp) + static_cast<double>(c.fn)) / n;
  double pred_pos = (static_cast<double>(c.tp) + static_cast<double>(c.fp)) / n;
  double pe = truth_pos * pred_pos + (1.0 - truth_pos) * (1.0 - pred_pos);
  if (pe >= 1.0) return 0.0;
  return (po - pe) / (1.0 - pe);
}

PerfRecord score(const ConfusionCounts& c) {
  double n = static_cast<double>(c.total());
  if (n == 0.0) throw Error(ErrorCode::InvalidArgument, "empty counts");
  double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);

  PerfRecord r;
  r.acc = (tp + tn) / n;
  r.f1 = (2.0 * tp + fp + fn) > 0.0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
  double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  r.mcc = denom > 0.0 ? (tp * tn - fp * fn) / std::sqrt(denom) : 0.0;
  r.kappa = kappa(c);
  return r;
}

}  // namespace rashomon
