#include "rashomon/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "rashomon/errors.hpp"
#include "rashomon/rng.hpp"

namespace rashomon {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == delim && !quoted) {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  out.push_back(cell);
  for (auto& s : out) {
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.data();
  const char* end = begin + s.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

void validate_dataset(const Dataset& d) {
  if (d.n() < 2) throw Error(ErrorCode::TooFewInstances, "dataset needs N >= 2");
  if (d.k() < 1) throw Error(ErrorCode::InvalidArgument, "dataset needs K >= 1");
  if (d.labels.size() != d.n()) {
    throw Error(ErrorCode::LengthMismatch, "labels length != feature rows");
  }
  if (d.feature_names.size() != d.k()) {
    throw Error(ErrorCode::LengthMismatch, "feature_names length != K");
  }
  std::set<std::string> names(d.feature_names.begin(), d.feature_names.end());
  if (names.size() != d.feature_names.size()) {
    throw Error(ErrorCode::InvalidArgument, "feature names not unique");
  }
  bool saw0 = false, saw1 = false;
  for (int y : d.labels) {
    if (y == 0) saw0 = true;
    else if (y == 1) saw1 = true;
    else throw Error(ErrorCode::NonBinaryLabel, "label outside {0,1}");
  }
  if (!saw0 || !saw1) throw Error(ErrorCode::DegenerateClass, "one class absent");
  for (std::size_t i = 0; i < d.n(); ++i) {
    for (std::size_t j = 0; j < d.k(); ++j) {
      if (!std::isfinite(d.features(i, j))) {
        throw Error(ErrorCode::NonFiniteValue,
                    "row " + std::to_string(i) + " column " + std::to_string(j));
      }
    }
  }
}

Dataset load_dataset(const std::string& path, const std::string& label_column,
                     const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);

  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split_line(line, options.delimiter));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, path);

  const auto& header = rows.front();
  std::size_t label_col = header.size();
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == label_column) label_col = j;
  }
  if (label_col == header.size()) {
    throw Error(ErrorCode::MissingLabelColumn, label_column + " not in header");
  }
  if (rows.size() < 2) throw Error(ErrorCode::EmptyFile, "no data rows in " + path);

  std::size_t n = rows.size() - 1;
  std::size_t width = header.size();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != width) {
      throw Error(ErrorCode::IoError,
                  "row " + std::to_string(i - 1) + " has " + std::to_string(rows[i].size()) +
                      " cells, expected " + std::to_string(width));
    }
  }

  // labels
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& cell = rows[i + 1][label_col];
    if (!options.label_map.empty()) {
      auto it = options.label_map.find(cell);
      if (it == options.label_map.end()) {
        throw Error(ErrorCode::NonBinaryLabel, "unmapped label value '" + cell + "'");
      }
      labels[i] = it->second;
    } else {
      auto v = parse_number(cell);
      if (!v || (*v != 0.0 && *v != 1.0)) {
        throw Error(ErrorCode::NonBinaryLabel, "label value '" + cell + "'");
      }
      labels[i] = static_cast<int>(*v);
    }
    if (labels[i] != 0 && labels[i] != 1) {
      throw Error(ErrorCode::NonBinaryLabel, "mapped label outside {0,1}");
    }
  }

  // per-column numeric parse; columns with any non-numeric cell are categorical
  struct Column {
    std::string name;
    bool categorical = false;
    std::vector<double> numeric;              // valid when !categorical
    std::vector<std::string> raw;             // valid when categorical
    std::vector<std::string> category_order;  // first-appearance codes
  };
  std::vector<Column> columns;
  for (std::size_t j = 0; j < width; ++j) {
    if (j == label_col) continue;
    Column col;
    col.name = header[j];
    col.numeric.resize(n);
    bool all_numeric = true;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& cell = rows[i + 1][j];
      auto v = parse_number(cell);
      if (v) {
        col.numeric[i] = *v;
      } else if (cell.empty() && options.impute_nonfinite) {
        col.numeric[i] = std::nan("");
      } else {
        all_numeric = false;
        break;
      }
    }
    if (!all_numeric) {
      col.categorical = true;
      col.raw.resize(n);
      std::map<std::string, double> codes;
      for (std::size_t i = 0; i < n; ++i) {
        const std::string& cell = rows[i + 1][j];
        col.raw[i] = cell;
        if (!codes.count(cell)) {
          codes[cell] = static_cast<double>(col.category_order.size());
          col.category_order.push_back(cell);
        }
      }
      col.numeric.resize(n);
      for (std::size_t i = 0; i < n; ++i) col.numeric[i] = codes[col.raw[i]];
    }
    columns.push_back(std::move(col));
  }

  // impute or reject non-finite numerics
  for (std::size_t c = 0; c < columns.size(); ++c) {
    auto& col = columns[c];
    if (col.categorical) continue;
    double sum = 0.0;
    std::size_t finite = 0;
    for (double v : col.numeric) {
      if (std::isfinite(v)) {
        sum += v;
        ++finite;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (std::isfinite(col.numeric[i])) continue;
      if (!options.impute_nonfinite || finite == 0) {
        throw Error(ErrorCode::NonFiniteValue,
                    "row " + std::to_string(i) + " column " + col.name);
      }
      col.numeric[i] = sum / static_cast<double>(finite);
    }
  }

  Dataset d;
  d.name = path;
  if (options.one_hot) {
    std::vector<std::vector<double>> feats;
    for (auto& col : columns) {
      if (col.categorical && col.category_order.size() > 2) {
        for (std::size_t c = 0; c < col.category_order.size(); ++c) {
          d.feature_names.push_back(col.name + "=" + col.category_order[c]);
          std::vector<double> ind(n, 0.0);
          for (std::size_t i = 0; i < n; ++i) {
            if (col.raw[i] == col.category_order[c]) ind[i] = 1.0;
          }
          feats.push_back(std::move(ind));
        }
      } else {
        d.feature_names.push_back(col.name);
        feats.push_back(col.numeric);
      }
    }
    d.features = Matrix(n, feats.size());
    for (std::size_t j = 0; j < feats.size(); ++j) {
      for (std::size_t i = 0; i < n; ++i) d.features(i, j) = feats[j][i];
    }
  } else {
    d.features = Matrix(n, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      d.feature_names.push_back(columns[j].name);
      for (std::size_t i = 0; i < n; ++i) d.features(i, j) = columns[j].numeric[i];
    }
  }
  d.labels = std::move(labels);
  validate_dataset(d);
  return d;
}

void write_dataset_csv(const Dataset& d, const std::string& path,
                       const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  for (const auto& name : d.feature_names) out << name << ',';
  out << label_column << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < d.n(); ++i) {
    for (std::size_t j = 0; j < d.k(); ++j) out << d.features(i, j) << ',';
    out << d.labels[i] << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

SplitPlan make_split(const Dataset& d, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "test_fraction must be in (0,1)");
  }
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < d.n(); ++i) {
    (d.labels[i] == 1 ? pos : neg).push_back(i);
  }
  if (pos.size() < 2 || neg.size() < 2) {
    throw Error(ErrorCode::DegenerateClass, "each class needs >= 2 instances to split");
  }

  SplitPlan plan;
  plan.seed = seed;
  auto deal = [&](std::vector<std::size_t>& cls, std::uint64_t sub) {
    Rng rng(mix_seed(seed, sub));
    rng.shuffle(cls);
    std::size_t n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(cls.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, cls.size() - 1);
    for (std::size_t i = 0; i < cls.size(); ++i) {
      (i < n_test ? plan.test_indices : plan.train_indices).push_back(cls[i]);
    }
  };
  deal(pos, 1);
  deal(neg, 2);
  std::sort(plan.train_indices.begin(), plan.train_indices.end());
  std::sort(plan.test_indices.begin(), plan.test_indices.end());
  return plan;
}

SplitPlan verbatim_split(std::size_t n_train, std::size_t n_test) {
  SplitPlan plan;
  plan.train_indices.resize(n_train);
  plan.test_indices.resize(n_test);
  for (std::size_t i = 0; i < n_train; ++i) plan.train_indices[i] = i;
  for (std::size_t i = 0; i < n_test; ++i) plan.test_indices[i] = n_train + i;
  return plan;
}

FoldPlan make_folds(std::size_t n, const std::vector<int>& labels, std::size_t k,
                    std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be >= 2");
  if (labels.size() != n) throw Error(ErrorCode::LengthMismatch, "labels length != n");
  if (n < k) throw Error(ErrorCode::TooFewInstances, "n < k");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < n; ++i) (labels[i] == 1 ? pos : neg).push_back(i);
  if (pos.size() < k || neg.size() < k) {
    throw Error(ErrorCode::TooFewPerClass, "each class needs >= k instances");
  }

  FoldPlan plan;
  plan.k = k;
  plan.assignments.assign(n, 0);
  std::size_t next_fold = 0;
  auto deal = [&](std::vector<std::size_t>& cls, std::uint64_t sub) {
    Rng rng(mix_seed(seed, sub));
    rng.shuffle(cls);
    for (std::size_t i = 0; i < cls.size(); ++i) {
      plan.assignments[cls[i]] = next_fold;
      next_fold = (next_fold + 1) % k;
    }
  };
  deal(pos, 11);
  deal(neg, 12);
  return plan;
}

SampleGrid make_grid(std::size_t train_size) {
  if (train_size < 16) throw Error(ErrorCode::TrainTooSmall, "train size < 16");
  SampleGrid grid;
  for (std::size_t s = 16; s <= train_size; s *= 2) grid.sizes.push_back(s);
  if (grid.sizes.back() != train_size) grid.sizes.push_back(train_size);
  return grid;
}

std::vector<std::size_t> subsample(const Dataset& d, std::span<const std::size_t> pool,
                                   std::size_t s, std::uint64_t seed, bool nested) {
  if (s > pool.size()) throw Error(ErrorCode::SizeTooLarge, "s > pool size");
  if (s < 2) throw Error(ErrorCode::InvalidArgument, "s < 2");

  // positions into `pool`, per class
  std::vector<std::size_t> pos, neg;
  for (std::size_t p = 0; p < pool.size(); ++p) {
    (d.labels[pool[p]] == 1 ? pos : neg).push_back(p);
  }
  if (pos.empty() || neg.empty()) {
    throw Error(ErrorCode::DegenerateClass, "pool has one class only");
  }

  std::uint64_t shuffle_seed = nested ? seed : mix_seed(seed, s);
  {
    Rng rng(mix_seed(shuffle_seed, 21));
    rng.shuffle(pos);
  }
  {
    Rng rng(mix_seed(shuffle_seed, 22));
    rng.shuffle(neg);
  }

  double ratio = static_cast<double>(pos.size()) / static_cast<double>(pool.size());
  long long want_pos = std::llround(ratio * static_cast<double>(s));
  long long lo = std::max<long long>(1, static_cast<long long>(s) -
                                            static_cast<long long>(neg.size()));
  long long hi = std::min<long long>(static_cast<long long>(s) - 1,
                                     static_cast<long long>(pos.size()));
  want_pos = std::clamp(want_pos, lo, hi);

  std::vector<std::size_t> positions;
  positions.reserve(s);
  for (long long i = 0; i < want_pos; ++i) positions.push_back(pos[i]);
  for (long long i = 0; i < static_cast<long long>(s) - want_pos; ++i) {
    positions.push_back(neg[i]);
  }
  std::sort(positions.begin(), positions.end());

  std::vector<std::size_t> out;
  out.reserve(s);
  for (std::size_t p : positions) out.push_back(pool[p]);
  return out;
}

std::uint64_t dataset_digest(const Dataset& d) {
  std::uint64_t h = fnv1a(d.features.data(), d.n() * d.k() * sizeof(double));
  h = fnv1a(d.labels.data(), d.labels.size() * sizeof(int), h);
  for (const auto& name : d.feature_names) h = fnv1a(name.data(), name.size(), h);
  return h;
}

}  // namespace rashomon
