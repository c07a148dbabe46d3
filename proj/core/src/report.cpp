#include "rashomon/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rashomon/errors.hpp"
#include "rashomon/rng.hpp"
#include "rashomon/stats.hpp"

namespace rashomon {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json jnum(double v) { return std::isfinite(v) ? json(v) : json(); }

std::string hex16(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << v;
  return out.str();
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json parse_artifact(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaMismatch,
                "artifact '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("schema_version") &&
      j.at("schema_version").get<long long>() != kSchemaVersion) {
    throw Error(ErrorCode::SchemaMismatch,
                "artifact '" + path.string() + "' has schema_version " +
                    j.at("schema_version").dump() + ", expected " +
                    std::to_string(kSchemaVersion));
  }
  return j;
}

json spec_to_json(const ModelSpec& spec) {
  json j;
  j["family"] = family_name(spec.family);
  j["hyperparams"] = json::object();
  for (const auto& [name, value] : spec.hyperparams) j["hyperparams"][name] = value;
  j["seed"] = spec.seed;
  return j;
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec spec;
  spec.family = family_from_name(j.at("family").get<std::string>());
  for (auto it = j.at("hyperparams").begin(); it != j.at("hyperparams").end(); ++it) {
    spec.hyperparams[it.key()] = it.value().get<double>();
  }
  spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

json perf_to_json(const PerfRecord& perf) {
  return {{"acc", jnum(perf.acc)},
          {"f1", jnum(perf.f1)},
          {"mcc", jnum(perf.mcc)},
          {"kappa", jnum(perf.kappa)}};
}

json candidate_to_json(const RankedCandidate& c) {
  json j = spec_to_json(c.spec);
  j["mean_kappa"] = jnum(c.mean_kappa);
  j["sd_kappa"] = jnum(c.sd_kappa);
  j["fold_kappas"] = c.fold_kappas;
  j["warnings"] = c.warnings;
  return j;
}

json dataset_info_json(const LoadedData& data) {
  return {{"name", data.full.name},
          {"rows", data.full.n()},
          {"features", data.full.k()},
          {"feature_names", data.full.feature_names},
          {"train_rows", data.train.n()},
          {"test_rows", data.test.n()},
          {"digest", hex16(dataset_digest(data.full))}};
}

json series_to_json(const AgreementSeries& s) {
  json points = json::array();
  for (const auto& p : s.points) {
    points.push_back({{"size", p.size}, {"value", jnum(p.value)}});
  }
  json j = {{"kind", s.kind}, {"model", s.model_id}, {"points", points}};
  if (s.kind == "topj") j["j"] = s.j;
  return j;
}

json correlation_rows_json(const std::vector<CorrelationRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    out.push_back({{"model", row.model_id},
                   {"n", row.n},
                   {"r", jnum(row.r)},
                   {"p", jnum(row.p)},
                   {"p_cor", jnum(row.p_cor)},
                   {"power", jnum(row.power)},
                   {"error", row.error}});
  }
  return out;
}

Dataset take_subset(const Dataset& d, const std::vector<std::size_t>& rows,
                    const std::string& suffix) {
  Dataset out;
  out.features = d.features.take_rows(rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(d.labels[r]);
  out.feature_names = d.feature_names;
  out.name = d.name + suffix;
  return out;
}

AuditConfig resolve_config(const AuditConfig& cfg, std::size_t train_rows) {
  AuditConfig resolved = cfg;
  if (resolved.families.empty()) {
    resolved.families.assign(std::begin(kAllFamilies), std::end(kAllFamilies));
  }
  if (resolved.grid.empty()) resolved.grid = make_grid(train_rows).sizes;
  for (std::size_t s : resolved.grid) {
    if (s > train_rows) {
      throw Error(ErrorCode::SizeTooLarge,
                  "grid size " + std::to_string(s) + " exceeds training pool " +
                      std::to_string(train_rows));
    }
  }
  return resolved;
}

std::vector<ModelSpec> top3_from_selection_json(const json& sel) {
  std::vector<ModelSpec> top3;
  for (const auto& name : sel.at("top3")) {
    bool found = false;
    for (const auto& row : sel.at("ranked")) {
      if (row.at("family") == name) {
        top3.push_back(spec_from_json(row));
        found = true;
        break;
      }
    }
    if (!found) {
      throw Error(ErrorCode::SchemaMismatch,
                  "selection artifact: top3 entry missing from ranked list");
    }
  }
  return top3;
}

struct SelectionArtifacts {
  SelectionResult sel;
  RashomonSet rset;
  json to_json(const std::string& hash, const LoadedData& data) const {
    json ranked = json::array();
    for (const auto& c : sel.ranked) ranked.push_back(candidate_to_json(c));
    json members = json::array();
    for (const auto& spec : rset.members) members.push_back(family_name(spec.family));
    json top3 = json::array();
    for (const auto& spec : sel.top3) top3.push_back(family_name(spec.family));
    return {{"schema_version", kSchemaVersion},
            {"config_hash", hash},
            {"dataset", dataset_info_json(data)},
            {"ranked", ranked},
            {"top3", top3},
            {"baseline", candidate_to_json(sel.baseline)},
            {"failed_families", sel.failed_families},
            {"rashomon",
             {{"reference_loss", jnum(rset.reference_loss)},
              {"epsilon", rset.epsilon},
              {"members", members},
              {"top3_subset", rset.top3_subset}}}};
  }
};

}  // namespace

LoadedData load_and_split(const AuditConfig& cfg) {
  IngestOptions opts;
  opts.impute_nonfinite = cfg.impute;
  opts.one_hot = cfg.one_hot;

  LoadedData data;
  if (!cfg.test_dataset.empty()) {
    data.train = load_dataset(cfg.dataset, cfg.label, opts);
    data.test = load_dataset(cfg.test_dataset, cfg.label, opts);
    if (data.train.feature_names != data.test.feature_names) {
      throw Error(ErrorCode::DimensionMismatch,
                  "train and test files disagree on feature columns");
    }
    data.full = data.train;
    data.full.features = Matrix(data.train.n() + data.test.n(), data.train.k());
    for (std::size_t i = 0; i < data.train.n(); ++i) {
      for (std::size_t j = 0; j < data.train.k(); ++j) {
        data.full.features(i, j) = data.train.features(i, j);
      }
    }
    for (std::size_t i = 0; i < data.test.n(); ++i) {
      for (std::size_t j = 0; j < data.test.k(); ++j) {
        data.full.features(data.train.n() + i, j) = data.test.features(i, j);
      }
    }
    data.full.labels = data.train.labels;
    data.full.labels.insert(data.full.labels.end(), data.test.labels.begin(),
                            data.test.labels.end());
  } else {
    data.full = load_dataset(cfg.dataset, cfg.label, opts);
    const SplitPlan plan =
        make_split(data.full, cfg.test_fraction, mix_seed(cfg.seed, fnv1a("split")));
    data.train = take_subset(data.full, plan.train_indices, ":train");
    data.test = take_subset(data.full, plan.test_indices, ":test");
  }
  return data;
}

std::vector<CorrelationRow> correlation_table(const std::vector<CorrelationPoints>& points,
                                              double alpha) {
  std::vector<CorrelationRow> rows;
  rows.reserve(points.size());
  for (const auto& pts : points) {
    CorrelationRow row;
    row.model_id = pts.model_id;
    row.n = pts.values.size();
    try {
      const SpearmanResult sr = spearman(pts.sizes, pts.values);
      row.r = sr.r;
      row.p = sr.p;
      row.p_cor = sr.p;
      if (std::abs(sr.r) >= 1.0 - 1e-15) {
        row.power = 1.0;
      } else {
        row.power = posthoc_power(sr.r, row.n, alpha);
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }

  std::vector<double> ps;
  for (const auto& row : rows) {
    if (row.error.empty()) ps.push_back(row.p);
  }
  if (!ps.empty()) {
    const std::vector<double> adjusted = bh_fdr(ps);
    std::size_t next = 0;
    for (auto& row : rows) {
      if (row.error.empty()) row.p_cor = adjusted[next++];
    }
  }
  return rows;
}

std::string cell_record_json(const SweepCell& cell) {
  json j;
  j["model"] = cell.model_id;
  j["size"] = cell.size;
  j["fold"] = cell.fold;
  j["derived_seed"] = cell.derived_seed;
  j["train_rows"] = cell.train_rows;
  j["ok"] = cell.ok;
  j["status"] = cell.status;
  if (cell.ok) {
    j["perf"] = perf_to_json(cell.perf);
    j["base"] = jnum(cell.base);
    j["importance"] = json::array();
    for (double v : cell.importance.per_feature) j["importance"].push_back(jnum(v));
    json rows = json::array();
    for (std::size_t i = 0; i < cell.attributions.rows(); ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < cell.attributions.cols(); ++k) {
        row.push_back(jnum(cell.attributions(i, k)));
      }
      rows.push_back(std::move(row));
    }
    j["attributions"] = std::move(rows);
  }
  return j.dump();
}

AuditOutcome run_select(const AuditConfig& cfg0, const std::string& out_dir,
                        std::size_t workers) {
  validate_config(cfg0);
  const LoadedData data = load_and_split(cfg0);
  const AuditConfig cfg = resolve_config(cfg0, data.train.n());
  const std::string hash = config_hash(cfg);

  AuditOutcome outcome;
  outcome.run_dir = out_dir;

  const FoldPlan folds = make_folds(data.train.n(), data.train.labels, cfg.folds,
                                    mix_seed(cfg.seed, fnv1a("folds")));
  SelectionArtifacts arts;
  arts.sel = select(data.train, cfg.families, folds, cfg.budget, cfg.seed, workers);
  arts.rset = rashomon_membership(arts.sel, cfg.epsilon);

  for (const auto& f : arts.sel.failed_families) {
    outcome.warnings.push_back("family failed: " + f);
  }
  if (!arts.rset.top3_subset) {
    outcome.warnings.push_back("top-3 selection is not fully inside the Rashomon set");
  }
  if (arts.sel.top3.size() < 3) {
    outcome.warnings.push_back("fewer than 3 families survived selection");
  }

  fs::create_directories(out_dir);
  write_text_file(fs::path(out_dir) / "config.resolved.json", config_to_json(cfg));
  write_text_file(fs::path(out_dir) / "selection.json",
                  arts.to_json(hash, data).dump(2) + "\n");
  outcome.exit_code = outcome.warnings.empty() ? 0 : 2;
  return outcome;
}

AuditOutcome run_audit(const AuditConfig& cfg0, const std::string& out_dir,
                       std::size_t workers) {
  validate_config(cfg0);
  const LoadedData data = load_and_split(cfg0);
  const AuditConfig cfg = resolve_config(cfg0, data.train.n());
  const std::string hash = config_hash(cfg);

  AuditOutcome outcome;
  outcome.run_dir = out_dir;
  fs::create_directories(out_dir);
  write_text_file(fs::path(out_dir) / "config.resolved.json", config_to_json(cfg));

  const FoldPlan folds = make_folds(data.train.n(), data.train.labels, cfg.folds,
                                    mix_seed(cfg.seed, fnv1a("folds")));
  SelectionArtifacts arts;
  arts.sel = select(data.train, cfg.families, folds, cfg.budget, cfg.seed, workers);
  arts.rset = rashomon_membership(arts.sel, cfg.epsilon);
  for (const auto& f : arts.sel.failed_families) {
    outcome.warnings.push_back("family failed: " + f);
  }
  if (!arts.rset.top3_subset) {
    outcome.warnings.push_back("top-3 selection is not fully inside the Rashomon set");
  }
  if (arts.sel.top3.size() < 3) {
    outcome.warnings.push_back("fewer than 3 families survived selection");
  }
  write_text_file(fs::path(out_dir) / "selection.json",
                  arts.to_json(hash, data).dump(2) + "\n");

  const SweepResult sweep = run_sweep(data.train, data.test, arts.sel.top3, cfg, workers);
  {
    std::ostringstream lines;
    for (const auto& cell : sweep.cells) lines << cell_record_json(cell) << "\n";
    write_text_file(fs::path(out_dir) / "cells.jsonl", lines.str());
  }
  std::size_t failed_cells = 0;
  std::size_t repaired_cells = 0;
  for (const auto& cell : sweep.cells) {
    if (!cell.ok) ++failed_cells;
    else if (cell.status.find("repaired-shrinkage") != std::string::npos) ++repaired_cells;
  }
  if (failed_cells > 0) {
    outcome.warnings.push_back(std::to_string(failed_cells) + " of " +
                               std::to_string(sweep.cells.size()) + " cells failed");
  }
  if (repaired_cells > 0) {
    outcome.warnings.push_back(std::to_string(repaired_cells) +
                               " cells trained with repaired covariance");
  }

  const MasMode mode = cfg.similarity.mas_mode;
  std::vector<AgreementSeries> all_series;
  auto add_series = [&](auto&& make, const std::string& what) {
    try {
      make();
    } catch (const Error& e) {
      outcome.warnings.push_back(what + " omitted: " + e.what());
    }
  };
  for (const auto& model : sweep.model_ids) {
    add_series([&] { all_series.push_back(intra_agreement(sweep, model, mode)); },
               "intra series for " + model);
    add_series(
        [&] {
          for (auto& s : intra_top_j(sweep, model, cfg.similarity.top_j)) {
            all_series.push_back(std::move(s));
          }
        },
        "top-j series for " + model);
  }
  add_series(
      [&] {
        all_series.push_back(
            inter_agreement(sweep, mode, cfg.similarity.fold_paired_inter));
      },
      "inter series");

  ConsensusVector cons;
  bool have_consensus = false;
  add_series(
      [&] {
        cons = sweep_consensus(sweep);
        have_consensus = true;
      },
      "consensus");
  if (have_consensus) {
    add_series(
        [&] {
          for (auto& s : convergence_to_consensus(sweep, cons, mode)) {
            all_series.push_back(std::move(s));
          }
        },
        "convergence series");
  }
  add_series([&] { all_series.push_back(dispersion_series(sweep, mode)); },
             "dispersion series");

  {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["config_hash"] = hash;
    j["model_ids"] = sweep.model_ids;
    j["sizes"] = sweep.sizes;
    j["folds"] = sweep.folds;
    j["explained_rows"] = sweep.explained_rows;
    j["background"] = {{"source", sweep.background.source},
                       {"rows", sweep.background.size()}};
    if (have_consensus) {
      json pf = json::array();
      for (double v : cons.per_feature) pf.push_back(jnum(v));
      j["consensus"] = {{"per_feature", pf},
                        {"model_count", cons.model_count},
                        {"sample_size", cons.sample_size}};
    }
    json series = json::array();
    for (const auto& s : all_series) series.push_back(series_to_json(s));
    j["series"] = series;
    write_text_file(fs::path(out_dir) / "series.json", j.dump(2) + "\n");
  }

  {
    json tables = json::object();
    tables["intra"] = correlation_rows_json(correlation_table(intra_points(sweep, mode), cfg.alpha));
    if (have_consensus) {
      std::vector<CorrelationPoints> single, bagged;
      for (auto& pts : convergence_points(sweep, cons, mode)) {
        (pts.model_id == "bagging" ? bagged : single).push_back(std::move(pts));
      }
      tables["convergence"] = correlation_rows_json(correlation_table(single, cfg.alpha));
      if (!bagged.empty()) {
        tables["bagging"] = correlation_rows_json(correlation_table(bagged, cfg.alpha));
      }
    } else {
      outcome.warnings.push_back("convergence correlation tables omitted: no consensus");
    }
    json j = {{"schema_version", kSchemaVersion},
              {"config_hash", hash},
              {"alpha", cfg.alpha},
              {"tables", tables}};
    write_text_file(fs::path(out_dir) / "correlations.json", j.dump(2) + "\n");
  }

  json baseline_test = json();
  try {
    const TrainedModel baseline =
        train(baseline_lr_spec(cfg.seed), data.train.features, data.train.labels);
    const std::vector<int> pred = baseline.predict(data.test.features);
    baseline_test = perf_to_json(score(confusion(data.test.labels, pred)));
  } catch (const Error& e) {
    outcome.warnings.push_back(std::string("baseline test scoring failed: ") + e.what());
  }

  {
    json top3 = json::array();
    for (const auto& spec : arts.sel.top3) top3.push_back(family_name(spec.family));
    json members = json::array();
    for (const auto& spec : arts.rset.members) members.push_back(family_name(spec.family));
    json j;
    j["schema_version"] = kSchemaVersion;
    j["config_hash"] = hash;
    j["dataset"] = dataset_info_json(data);
    j["top3"] = top3;
    j["rashomon"] = {{"reference_loss", jnum(arts.rset.reference_loss)},
                     {"epsilon", arts.rset.epsilon},
                     {"members", members},
                     {"top3_subset", arts.rset.top3_subset}};
    j["baseline"] = {{"family", "lr"},
                     {"cv_mean_kappa", jnum(arts.sel.baseline.mean_kappa)},
                     {"cv_sd_kappa", jnum(arts.sel.baseline.sd_kappa)},
                     {"test", baseline_test}};
    j["cells"] = {{"total", sweep.cells.size()},
                  {"failed", failed_cells},
                  {"repaired", repaired_cells},
                  {"models", sweep.model_ids.size()},
                  {"sizes", sweep.sizes.size()},
                  {"folds", sweep.folds}};
    j["warnings"] = outcome.warnings;
    write_text_file(fs::path(out_dir) / "summary.json", j.dump(2) + "\n");
  }

  outcome.exit_code = outcome.warnings.empty() ? 0 : 2;
  return outcome;
}

namespace {

json load_optional(const fs::path& dir, const std::string& name,
                   std::vector<std::string>& warnings) {
  const fs::path path = dir / name;
  if (!fs::exists(path)) {
    warnings.push_back("artifact " + name + " missing; dependent outputs skipped");
    return json();
  }
  return parse_artifact(path);
}

}  // namespace

AuditOutcome run_report(const std::string& run_dir, const std::string& out_dir) {
  const fs::path dir(run_dir);
  if (!fs::exists(dir / "config.resolved.json")) {
    throw Error(ErrorCode::MissingRun,
                "'" + run_dir + "' is not a run directory (no config.resolved.json)");
  }
  parse_artifact(dir / "config.resolved.json");  // schema validation only
  const std::string hash = hex16(fnv1a(read_text_file(dir / "config.resolved.json")));

  AuditOutcome outcome;
  outcome.run_dir = run_dir;
  fs::create_directories(out_dir);
  const fs::path out(out_dir);

  auto check_hash = [&](const json& j, const std::string& name) {
    if (j.is_object() && j.contains("config_hash") &&
        j.at("config_hash").get<std::string>() != hash) {
      throw Error(ErrorCode::SchemaMismatch,
                  "artifact " + name + " belongs to a different config (hash mismatch)");
    }
  };

  const json sel = load_optional(dir, "selection.json", outcome.warnings);
  if (!sel.is_null()) {
    check_hash(sel, "selection.json");
    std::set<std::string> members, selected;
    for (const auto& m : sel.at("rashomon").at("members")) {
      members.insert(m.get<std::string>());
    }
    for (const auto& m : sel.at("top3")) selected.insert(m.get<std::string>());
    std::ostringstream csv;
    csv << "role,family,hyperparams,mean_kappa,sd_kappa,rashomon_member,selected\n";
    auto hp_string = [](const json& row) {
      std::string hp;
      for (auto it = row.at("hyperparams").begin(); it != row.at("hyperparams").end();
           ++it) {
        if (!hp.empty()) hp += ";";
        hp += it.key() + "=" + fmt(it.value().get<double>());
      }
      return hp;
    };
    for (const auto& row : sel.at("ranked")) {
      const std::string family = row.at("family").get<std::string>();
      csv << "candidate," << family << "," << csv_escape(hp_string(row)) << ","
          << fmt(row.at("mean_kappa").get<double>()) << ","
          << fmt(row.at("sd_kappa").get<double>()) << ","
          << (members.count(family) ? "true" : "false") << ","
          << (selected.count(family) ? "true" : "false") << "\n";
    }
    const json& base = sel.at("baseline");
    csv << "baseline,lr," << csv_escape(hp_string(base)) << ","
        << (base.at("mean_kappa").is_null() ? "" : fmt(base.at("mean_kappa").get<double>()))
        << ","
        << (base.at("sd_kappa").is_null() ? "" : fmt(base.at("sd_kappa").get<double>()))
        << ",,\n";
    write_text_file(out / "selection.csv", csv.str());
  }

  if (fs::exists(dir / "cells.jsonl")) {
    std::istringstream lines(read_text_file(dir / "cells.jsonl"));
    std::ostringstream csv;
    csv << "model,size,fold,status,acc,f1,mcc,kappa\n";
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      json cell;
      try {
        cell = json::parse(line);
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::SchemaMismatch,
                    std::string("cells.jsonl has a malformed record: ") + e.what());
      }
      csv << cell.at("model").get<std::string>() << "," << cell.at("size") << ","
          << cell.at("fold") << "," << csv_escape(cell.at("status").get<std::string>());
      if (cell.at("ok").get<bool>()) {
        const json& perf = cell.at("perf");
        csv << "," << fmt(perf.at("acc").get<double>()) << ","
            << fmt(perf.at("f1").get<double>()) << "," << fmt(perf.at("mcc").get<double>())
            << "," << fmt(perf.at("kappa").get<double>());
      } else {
        csv << ",,,,";
      }
      csv << "\n";
    }
    write_text_file(out / "performance.csv", csv.str());
  } else {
    outcome.warnings.push_back("artifact cells.jsonl missing; dependent outputs skipped");
  }

  const json series = load_optional(dir, "series.json", outcome.warnings);
  if (!series.is_null()) {
    check_hash(series, "series.json");
    std::ostringstream csv;
    csv << "kind,model,j,size,value\n";
    for (const auto& s : series.at("series")) {
      const std::string kind = s.at("kind").get<std::string>();
      const std::string model = s.at("model").get<std::string>();
      const std::string jcol = s.contains("j") ? std::to_string(s.at("j").get<std::size_t>()) : "";
      for (const auto& p : s.at("points")) {
        csv << kind << "," << model << "," << jcol << "," << p.at("size") << ","
            << fmt(p.at("value").get<double>()) << "\n";
      }
    }
    write_text_file(out / "series.csv", csv.str());
  }

  const json correlations = load_optional(dir, "correlations.json", outcome.warnings);
  if (!correlations.is_null()) {
    check_hash(correlations, "correlations.json");
    std::ostringstream csv;
    csv << "table,model,n,r,p,p_cor,power,error\n";
    const json& tables = correlations.at("tables");
    for (const std::string name : {"intra", "convergence", "bagging"}) {
      if (!tables.contains(name)) {
        outcome.warnings.push_back(name + " correlation table missing from run");
        continue;
      }
      for (const auto& row : tables.at(name)) {
        const bool failed = !row.at("error").get<std::string>().empty();
        csv << name << "," << row.at("model").get<std::string>() << "," << row.at("n");
        if (failed) {
          csv << ",,,,," << csv_escape(row.at("error").get<std::string>());
        } else {
          csv << "," << fmt(row.at("r").get<double>()) << ","
              << fmt(row.at("p").get<double>()) << "," << fmt(row.at("p_cor").get<double>())
              << "," << fmt(row.at("power").get<double>()) << ",";
        }
        csv << "\n";
      }
    }
    write_text_file(out / "correlations.csv", csv.str());
  }

  // Plot-data bundle: x/y series with legend labels, one figure per curve
  // family in the report.
  {
    json figures = json::array();
    auto figure = [](const std::string& id, const std::string& title,
                     const std::string& y_label) {
      return json{{"id", id},
                  {"title", title},
                  {"x_label", "training sample size"},
                  {"y_label", y_label},
                  {"series", json::array()}};
    };

    if (fs::exists(dir / "cells.jsonl")) {
      // model -> size -> (sum kappa, count) over successful folds
      std::map<std::string, std::map<std::size_t, std::pair<double, std::size_t>>> perf;
      std::istringstream lines(read_text_file(dir / "cells.jsonl"));
      std::string line;
      while (std::getline(lines, line)) {
        if (line.empty()) continue;
        const json cell = json::parse(line);
        if (!cell.at("ok").get<bool>()) continue;
        auto& slot =
            perf[cell.at("model").get<std::string>()][cell.at("size").get<std::size_t>()];
        slot.first += cell.at("perf").at("kappa").get<double>();
        slot.second += 1;
      }
      json fig = figure("performance", "Test kappa by training sample size",
                        "Cohen's kappa (fold mean)");
      for (const auto& [model, by_size] : perf) {
        json xs = json::array(), ys = json::array();
        for (const auto& [size, sums] : by_size) {
          xs.push_back(size);
          ys.push_back(jnum(sums.first / static_cast<double>(sums.second)));
        }
        fig["series"].push_back({{"label", model}, {"x", xs}, {"y", ys}});
      }
      figures.push_back(std::move(fig));
    }

    if (!series.is_null()) {
      json intra = figure("intra", "Intra-model agreement by sample size", "wcossim");
      json topj = figure("topj", "Top-j rank agreement by sample size", "mean top_j overlap");
      json inter = figure("inter", "Inter-model agreement by sample size", "wcossim");
      json conv = figure("convergence", "Convergence towards the consensus explanation",
                         "wcossim to consensus");
      json disp = figure("dispersion", "Fold-pair agreement spread by sample size",
                         "std of fold-pair wcossim");
      for (const auto& s : series.at("series")) {
        const std::string kind = s.at("kind").get<std::string>();
        json xs = json::array(), ys = json::array();
        for (const auto& p : s.at("points")) {
          xs.push_back(p.at("size"));
          ys.push_back(p.at("value"));
        }
        const std::string model = s.at("model").get<std::string>();
        json entry = {{"label", model}, {"x", xs}, {"y", ys}};
        if (kind == "intra") {
          intra["series"].push_back(std::move(entry));
        } else if (kind == "topj") {
          entry["label"] = model + " top_" + std::to_string(s.at("j").get<std::size_t>());
          topj["series"].push_back(std::move(entry));
        } else if (kind == "inter") {
          entry["label"] = "top-3 models";
          inter["series"].push_back(std::move(entry));
        } else if (kind == "convergence" || kind == "bagging-convergence") {
          conv["series"].push_back(std::move(entry));
        } else if (kind == "dispersion") {
          entry["label"] = "top-3 pooled";
          disp["series"].push_back(std::move(entry));
        }
      }
      for (auto& fig : {std::ref(intra), std::ref(topj), std::ref(inter), std::ref(conv),
                        std::ref(disp)}) {
        if (!fig.get()["series"].empty()) figures.push_back(std::move(fig.get()));
      }
    }

    json bundle = {{"schema_version", kSchemaVersion},
                   {"config_hash", hash},
                   {"figures", figures},
                   {"warnings", outcome.warnings}};
    write_text_file(out / "plot_data.json", bundle.dump(2) + "\n");
  }

  outcome.exit_code = outcome.warnings.empty() ? 0 : 2;
  return outcome;
}

SweepCell run_single_cell(const std::string& run_dir, const std::string& model_id,
                          std::size_t size, std::size_t fold) {
  const fs::path dir(run_dir);
  if (!fs::exists(dir / "config.resolved.json")) {
    throw Error(ErrorCode::MissingRun,
                "'" + run_dir + "' is not a run directory (no config.resolved.json)");
  }
  const AuditConfig cfg = parse_config(read_text_file(dir / "config.resolved.json"));
  if (!fs::exists(dir / "selection.json")) {
    throw Error(ErrorCode::MissingRun, "run has no selection.json; run select or audit first");
  }
  const json sel = parse_artifact(dir / "selection.json");
  const std::vector<ModelSpec> top3 = top3_from_selection_json(sel);
  const LoadedData data = load_and_split(cfg);
  return run_cell(data.train, data.test, top3, cfg, model_id, size, fold);
}

}  // namespace rashomon
