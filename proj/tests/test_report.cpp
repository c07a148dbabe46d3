#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rashomon/config.hpp"
#include "rashomon/dataset.hpp"
#include "rashomon/errors.hpp"
#include "rashomon/report.hpp"
#include "rashomon/rng.hpp"
#include "rashomon/stats.hpp"
#include "rashomon/synth.hpp"

using namespace rashomon;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<ErrorCode> code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("rashomon-report-" + std::to_string(getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str(const std::string& rel) const { return (path / rel).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) {
    if (c == '\n') ++n;
  }
  return n;
}

AuditConfig audit_config(const std::string& csv_path) {
  AuditConfig cfg;
  cfg.dataset = csv_path;
  cfg.seed = 21;
  cfg.folds = 3;
  cfg.test_fraction = 0.25;
  cfg.budget = 2;
  cfg.grid = {16, 32};
  cfg.families = {family_from_name("lr"), family_from_name("ridge"),
                  family_from_name("nb"), family_from_name("dt")};
  cfg.shap.background = 8;
  cfg.shap.max_instances = 6;
  cfg.similarity.top_j = {1, 2};
  return cfg;
}

std::string planted_csv(const TempDir& dir, std::uint64_t seed) {
  const Dataset d = make_planted(140, 3, 0.1, seed);
  const std::string path = dir.str("planted.csv");
  write_dataset_csv(d, path);
  return path;
}

}  // namespace

TEST_CASE("config serialization round-trips byte-stably") {
  AuditConfig cfg;
  cfg.dataset = "data.csv";
  cfg.test_dataset = "test.csv";
  cfg.label = "y";
  cfg.test_fraction = 0.3;
  cfg.impute = true;
  cfg.one_hot = true;
  cfg.seed = 99;
  cfg.folds = 5;
  cfg.epsilon = 0.1;
  cfg.grid = {16, 64};
  cfg.nested = false;
  cfg.families = {family_from_name("lr"), family_from_name("dt"), family_from_name("nb")};
  cfg.budget = 7;
  cfg.bagging = false;
  cfg.shap.background = 32;
  cfg.shap.background_mean = true;
  cfg.shap.nsamples = 512;
  cfg.shap.enumeration_threshold = 10;
  cfg.shap.max_instances = 12;
  cfg.similarity.top_j = {2, 4};
  cfg.similarity.mas_mode = MasMode::scalar;
  cfg.similarity.fold_paired_inter = true;
  cfg.alpha = 0.01;

  const std::string text = config_to_json(cfg);
  const AuditConfig back = parse_config(text);
  CHECK(back.dataset == cfg.dataset);
  CHECK(back.test_dataset == cfg.test_dataset);
  CHECK(back.label == cfg.label);
  CHECK(back.test_fraction == cfg.test_fraction);
  CHECK(back.impute == cfg.impute);
  CHECK(back.one_hot == cfg.one_hot);
  CHECK(back.seed == cfg.seed);
  CHECK(back.folds == cfg.folds);
  CHECK(back.epsilon == cfg.epsilon);
  CHECK(back.grid == cfg.grid);
  CHECK(back.nested == cfg.nested);
  CHECK(back.families == cfg.families);
  CHECK(back.budget == cfg.budget);
  CHECK(back.bagging == cfg.bagging);
  CHECK(back.shap.background == cfg.shap.background);
  CHECK(back.shap.background_mean == cfg.shap.background_mean);
  CHECK(back.shap.nsamples == cfg.shap.nsamples);
  CHECK(back.shap.enumeration_threshold == cfg.shap.enumeration_threshold);
  CHECK(back.shap.max_instances == cfg.shap.max_instances);
  CHECK(back.similarity.top_j == cfg.similarity.top_j);
  CHECK(back.similarity.mas_mode == cfg.similarity.mas_mode);
  CHECK(back.similarity.fold_paired_inter == cfg.similarity.fold_paired_inter);
  CHECK(back.alpha == cfg.alpha);

  CHECK(config_to_json(back) == text);
  CHECK(json::parse(text).at("schema_version").get<int>() == kSchemaVersion);
}

TEST_CASE("parse_config rejects unknown keys and bad types") {
  CHECK(parse_config("{}").folds == 10);
  CHECK(code_of([] { parse_config("not json"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config("[1,2]"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config(R"({"zzz": 1})"); }) == ErrorCode::ConfigError);
  try {
    parse_config(R"({"shap": {"zzz": 1}})");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("shap.zzz") != std::string::npos);
  }
  CHECK(code_of([] { parse_config(R"({"folds": "ten"})"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config(R"({"folds": -1})"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config(R"({"impute": 1})"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config(R"({"grid": [16, 1.5]})"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config(R"({"grid": [1]})"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config(R"({"families": ["bogus"]})"); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config(R"({"similarity": {"top_j": [0]}})"); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config(R"({"similarity": {"mas_mode": "zz"}})"); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { parse_config(R"({"schema_version": 2})"); }) ==
        ErrorCode::SchemaMismatch);
  CHECK(parse_config(R"({"schema_version": 1})").folds == 10);
}

TEST_CASE("validate_config enforces every documented bound") {
  AuditConfig good;
  good.dataset = "d.csv";
  validate_config(good);

  auto broken = [&](const std::function<void(AuditConfig&)>& mutate) {
    AuditConfig c = good;
    mutate(c);
    return code_of([&] { validate_config(c); });
  };

  CHECK(broken([](AuditConfig& c) { c.dataset.clear(); }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.test_fraction = 0.0; }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.test_fraction = 1.0; }) == ErrorCode::ConfigError);
  {
    AuditConfig c = good;
    c.test_dataset = "t.csv";
    c.test_fraction = 5.0;  // ignored when a test file is given
    validate_config(c);
  }
  CHECK(broken([](AuditConfig& c) { c.folds = 1; }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.top_k = 2; }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.epsilon = -0.1; }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.budget = 0; }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.alpha = 0.0; }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.alpha = 1.0; }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.grid = {32, 32}; }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.grid = {2, 16}; }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) {
          c.families = {family_from_name("lr"), family_from_name("lr"),
                        family_from_name("dt")};
        }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) {
          c.families = {family_from_name("lr"), family_from_name("dt")};
        }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.shap.background = 0; }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.shap.enumeration_threshold = 0; }) ==
        ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.shap.enumeration_threshold = 21; }) ==
        ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.shap.nsamples = 3; }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.similarity.top_j = {}; }) == ErrorCode::ConfigError);
  CHECK(broken([](AuditConfig& c) { c.similarity.top_j = {3, 1}; }) ==
        ErrorCode::ConfigError);
}

TEST_CASE("config_hash tracks the canonical serialization") {
  AuditConfig a;
  a.dataset = "x.csv";
  const std::string h = config_hash(a);
  CHECK(h.size() == 16);
  CHECK(h == config_hash(a));

  std::ostringstream expected;
  expected << std::hex << std::setw(16) << std::setfill('0') << fnv1a(config_to_json(a));
  CHECK(h == expected.str());

  AuditConfig b = a;
  b.seed = 2;
  CHECK(config_hash(b) != h);
}

TEST_CASE("load_config_file reads and validates") {
  TempDir dir;
  const std::string path = dir.str("cfg.json");
  {
    std::ofstream out(path);
    out << R"({"dataset": "d.csv", "folds": 4})";
  }
  const AuditConfig c = load_config_file(path);
  CHECK(c.dataset == "d.csv");
  CHECK(c.folds == 4);
  CHECK(code_of([&] { load_config_file(dir.str("missing.json")); }) == ErrorCode::IoError);
}

TEST_CASE("correlation_table runs spearman with BH inside the table") {
  CorrelationPoints perfect;
  perfect.model_id = "perfect";
  perfect.sizes = {16, 32, 64, 128, 256};
  perfect.values = {0.1, 0.2, 0.3, 0.4, 0.5};

  CorrelationPoints noisy;
  noisy.model_id = "noisy";
  noisy.sizes = {16, 32, 64, 128, 256};
  noisy.values = {2, 1, 4, 3, 5};

  CorrelationPoints flat;
  flat.model_id = "flat";
  flat.sizes = {16, 32, 64, 128, 256};
  flat.values = {0.7, 0.7, 0.7, 0.7, 0.7};

  CorrelationPoints tiny;
  tiny.model_id = "tiny";
  tiny.sizes = {16, 32};
  tiny.values = {0.1, 0.2};

  const auto rows = correlation_table({perfect, noisy, flat, tiny}, 0.05);
  REQUIRE(rows.size() == 4);

  CHECK(rows[0].model_id == "perfect");
  CHECK(rows[0].n == 5);
  CHECK(rows[0].r == doctest::Approx(1.0));
  CHECK(rows[0].p == 0.0);
  CHECK(rows[0].power == 1.0);
  CHECK(rows[0].error.empty());

  CHECK(rows[1].r == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(rows[1].p == doctest::Approx(0.10408803866182788).epsilon(1e-12));
  CHECK(rows[1].power ==
        doctest::Approx(posthoc_power(rows[1].r, 5, 0.05)).epsilon(1e-12));

  CHECK_FALSE(rows[2].error.empty());
  CHECK_FALSE(rows[3].error.empty());

  const std::vector<double> adjusted =
      bh_fdr(std::vector<double>{rows[0].p, rows[1].p});
  CHECK(rows[0].p_cor == adjusted[0]);
  CHECK(rows[1].p_cor == adjusted[1]);
}

TEST_CASE("cell_record_json is a full record for ok cells and a stub otherwise") {
  SweepCell cell;
  cell.model_id = "lr";
  cell.size = 32;
  cell.fold = 1;
  cell.derived_seed = 42;
  cell.train_rows = 20;
  cell.ok = true;
  cell.status = "ok";
  cell.perf = {0.9, 0.8, 0.7, 0.6};
  cell.base = 0.25;
  cell.importance.per_feature = {0.5, 0.1};
  cell.attributions = Matrix(1, 2);
  cell.attributions(0, 0) = 0.25;
  cell.attributions(0, 1) = -0.5;

  const json j = json::parse(cell_record_json(cell));
  CHECK(j.at("model") == "lr");
  CHECK(j.at("size") == 32);
  CHECK(j.at("fold") == 1);
  CHECK(j.at("derived_seed") == 42);
  CHECK(j.at("train_rows") == 20);
  CHECK(j.at("ok") == true);
  CHECK(j.at("perf").at("acc") == 0.9);
  CHECK(j.at("perf").at("kappa") == 0.6);
  CHECK(j.at("base") == 0.25);
  CHECK(j.at("importance") == json::array({0.5, 0.1}));
  CHECK(j.at("attributions") == json::array({json::array({0.25, -0.5})}));

  cell.ok = false;
  cell.status = "failed: boom";
  const json f = json::parse(cell_record_json(cell));
  CHECK(f.at("ok") == false);
  CHECK(f.at("status") == "failed: boom");
  CHECK_FALSE(f.contains("perf"));
  CHECK_FALSE(f.contains("attributions"));
}

TEST_CASE("load_and_split covers both split modes") {
  TempDir dir;
  const std::string path = planted_csv(dir, 5);

  AuditConfig cfg;
  cfg.dataset = path;
  cfg.test_fraction = 0.25;
  cfg.seed = 3;
  const LoadedData frac = load_and_split(cfg);
  CHECK(frac.full.n() == 140);
  const SplitPlan plan = make_split(frac.full, 0.25, mix_seed(cfg.seed, fnv1a("split")));
  CHECK(frac.train.n() == plan.train_indices.size());
  CHECK(frac.test.n() == plan.test_indices.size());
  CHECK(frac.train.n() + frac.test.n() == 140);
  CHECK(frac.train.k() == 3);
  CHECK(frac.train.feature_names == frac.full.feature_names);

  const Dataset head = make_planted(60, 3, 0.1, 6, "head");
  const Dataset tail = make_planted(30, 3, 0.1, 7, "tail");
  const std::string train_path = dir.str("train.csv");
  const std::string test_path = dir.str("test.csv");
  write_dataset_csv(head, train_path);
  write_dataset_csv(tail, test_path);

  AuditConfig two;
  two.dataset = train_path;
  two.test_dataset = test_path;
  const LoadedData pair = load_and_split(two);
  CHECK(pair.train.n() == 60);
  CHECK(pair.test.n() == 30);
  CHECK(pair.full.n() == 90);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(pair.full.features(60, j) == pair.test.features(0, j));
  }

  Dataset renamed = tail;
  renamed.feature_names = {"p", "q", "r"};
  const std::string renamed_path = dir.str("renamed.csv");
  write_dataset_csv(renamed, renamed_path);
  AuditConfig bad = two;
  bad.test_dataset = renamed_path;
  CHECK(code_of([&] { load_and_split(bad); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("run_select writes reproducible selection artifacts") {
  TempDir dir;
  const std::string csv = planted_csv(dir, 11);
  const AuditConfig cfg = audit_config(csv);

  const AuditOutcome out = run_select(cfg, dir.str("run1"));
  CHECK(out.run_dir == dir.str("run1"));
  CHECK(fs::exists(dir.path / "run1" / "config.resolved.json"));
  CHECK(fs::exists(dir.path / "run1" / "selection.json"));
  CHECK(out.exit_code == (out.warnings.empty() ? 0 : 2));

  const std::string resolved_text = slurp(dir.path / "run1" / "config.resolved.json");
  const AuditConfig resolved = parse_config(resolved_text);
  CHECK(resolved.families.size() == 4);
  CHECK(resolved.grid == cfg.grid);

  const json sel = json::parse(slurp(dir.path / "run1" / "selection.json"));
  CHECK(sel.at("schema_version") == kSchemaVersion);
  CHECK(sel.at("config_hash") == config_hash(resolved));
  CHECK(sel.at("top3").size() == 3);
  CHECK(sel.at("ranked").size() == 4);
  CHECK(sel.at("baseline").at("family") == "lr");
  CHECK(sel.at("dataset").at("rows") == 140);
  CHECK(sel.at("dataset").at("features") == 3);
  CHECK(sel.at("dataset").at("train_rows").get<std::size_t>() +
            sel.at("dataset").at("test_rows").get<std::size_t>() ==
        140);
  CHECK(sel.at("dataset").at("digest").get<std::string>().size() == 16);
  CHECK(sel.at("rashomon").at("epsilon") == 0.05);
  for (const auto& m : sel.at("rashomon").at("members")) {
    bool in_ranked = false;
    for (const auto& row : sel.at("ranked")) {
      if (row.at("family") == m) in_ranked = true;
    }
    CHECK(in_ranked);
  }

  run_select(cfg, dir.str("run2"));
  CHECK(slurp(dir.path / "run2" / "selection.json") ==
        slurp(dir.path / "run1" / "selection.json"));
  CHECK(slurp(dir.path / "run2" / "config.resolved.json") == resolved_text);

  AuditConfig wide = cfg;
  wide.epsilon = 1.0;
  run_select(wide, dir.str("run3"));
  const json sel3 = json::parse(slurp(dir.path / "run3" / "selection.json"));
  CHECK(sel3.at("rashomon").at("members").size() == sel3.at("ranked").size());
}

TEST_CASE("run_audit produces the full artifact set and replays byte-identically") {
  TempDir dir;
  const std::string csv = planted_csv(dir, 13);
  const AuditConfig cfg = audit_config(csv);

  const AuditOutcome out = run_audit(cfg, dir.str("run"), 1);
  const fs::path run = dir.path / "run";
  for (const std::string name : {"config.resolved.json", "selection.json", "cells.jsonl",
                                 "series.json", "correlations.json", "summary.json"}) {
    CHECK(fs::exists(run / name));
  }

  const std::string cells_text = slurp(run / "cells.jsonl");
  CHECK(line_count(cells_text) == 24);
  {
    std::istringstream lines(cells_text);
    std::string line;
    std::set<std::string> coords;
    std::size_t ok_cells = 0;
    while (std::getline(lines, line)) {
      const json cell = json::parse(line);
      coords.insert(cell.at("model").get<std::string>() + "/" +
                    std::to_string(cell.at("size").get<std::size_t>()) + "/" +
                    std::to_string(cell.at("fold").get<std::size_t>()));
      if (cell.at("ok").get<bool>()) {
        ++ok_cells;
        CHECK(cell.at("importance").size() == 3);
        CHECK(cell.at("attributions").size() == 6);
      }
    }
    CHECK(coords.size() == 24);
    CHECK(ok_cells == 24);
  }

  const json series = json::parse(slurp(run / "series.json"));
  CHECK(series.at("schema_version") == kSchemaVersion);
  CHECK(series.at("model_ids").size() == 4);
  CHECK(series.at("model_ids").back() == "bagging");
  CHECK(series.at("sizes") == json::array({16, 32}));
  CHECK(series.at("folds") == 3);
  CHECK(series.at("explained_rows").size() == 6);
  CHECK(series.at("background").at("rows") == 8);
  CHECK(series.at("consensus").at("per_feature").size() == 3);
  CHECK(series.at("consensus").at("model_count") == 3);
  CHECK(series.at("consensus").at("sample_size") == 32);
  {
    std::map<std::string, int> kinds;
    for (const auto& s : series.at("series")) {
      kinds[s.at("kind").get<std::string>()]++;
    }
    CHECK(kinds["intra"] == 4);
    CHECK(kinds["topj"] == 8);
    CHECK(kinds["inter"] == 1);
    CHECK(kinds["convergence"] == 3);
    CHECK(kinds["bagging-convergence"] == 1);
    CHECK(kinds["dispersion"] == 1);
  }

  const json correlations = json::parse(slurp(run / "correlations.json"));
  CHECK(correlations.at("alpha") == 0.05);
  CHECK(correlations.at("tables").at("intra").size() == 4);
  CHECK(correlations.at("tables").at("convergence").size() == 3);
  CHECK(correlations.at("tables").at("bagging").size() == 1);
  for (const auto& row : correlations.at("tables").at("intra")) {
    if (!row.at("error").get<std::string>().empty()) continue;
    CHECK(row.at("n").get<std::size_t>() == 6);
    CHECK(row.at("p_cor").get<double>() >= row.at("p").get<double>() - 1e-15);
  }

  const json summary = json::parse(slurp(run / "summary.json"));
  CHECK(summary.at("cells").at("total") == 24);
  CHECK(summary.at("cells").at("failed") == 0);
  CHECK(summary.at("cells").at("models") == 4);
  CHECK(summary.at("top3").size() == 3);
  CHECK(summary.at("baseline").at("family") == "lr");
  CHECK(summary.at("baseline").at("test").contains("acc"));
  CHECK(summary.at("warnings").size() == out.warnings.size());
  CHECK(out.exit_code == (out.warnings.empty() ? 0 : 2));

  run_audit(cfg, dir.str("replay"), 1);
  run_audit(cfg, dir.str("threaded"), 2);
  for (const std::string name : {"config.resolved.json", "selection.json", "cells.jsonl",
                                 "series.json", "correlations.json", "summary.json"}) {
    CHECK(slurp(dir.path / "replay" / name) == slurp(run / name));
    CHECK(slurp(dir.path / "threaded" / name) == slurp(run / name));
  }
}

TEST_CASE("run_report renders an existing run without recomputing") {
  TempDir dir;
  const std::string csv = planted_csv(dir, 17);
  const AuditConfig cfg = audit_config(csv);
  run_audit(cfg, dir.str("run"), 1);

  const AuditOutcome rep = run_report(dir.str("run"), dir.str("out"));
  CHECK(rep.exit_code == 0);
  const fs::path out = dir.path / "out";
  for (const std::string name : {"selection.csv", "performance.csv", "series.csv",
                                 "correlations.csv", "plot_data.json"}) {
    CHECK(fs::exists(out / name));
  }

  const std::string perf_csv = slurp(out / "performance.csv");
  CHECK(line_count(perf_csv) == 25);
  CHECK(perf_csv.rfind("model,size,fold,status,acc,f1,mcc,kappa\n", 0) == 0);

  const std::string sel_csv = slurp(out / "selection.csv");
  CHECK(line_count(sel_csv) == 6);  // header + 4 candidates + baseline

  const json plot = json::parse(slurp(out / "plot_data.json"));
  CHECK(plot.at("figures").size() == 6);
  std::set<std::string> ids;
  for (const auto& fig : plot.at("figures")) {
    ids.insert(fig.at("id").get<std::string>());
    CHECK_FALSE(fig.at("series").empty());
    for (const auto& s : fig.at("series")) {
      CHECK(s.at("x").size() == s.at("y").size());
    }
  }
  CHECK(ids == std::set<std::string>{"performance", "intra", "topj", "inter",
                                     "convergence", "dispersion"});

  run_report(dir.str("run"), dir.str("out2"));
  for (const std::string name : {"selection.csv", "performance.csv", "series.csv",
                                 "correlations.csv", "plot_data.json"}) {
    CHECK(slurp(dir.path / "out2" / name) == slurp(out / name));
  }

  CHECK(code_of([&] { run_report(dir.str("nowhere"), dir.str("out3")); }) ==
        ErrorCode::MissingRun);

  // a tampered artifact hash is rejected
  {
    const fs::path series_path = dir.path / "run" / "series.json";
    json tampered = json::parse(slurp(series_path));
    tampered["config_hash"] = "0000000000000000";
    std::ofstream rewrite(series_path, std::ios::binary);
    rewrite << tampered.dump(2) << "\n";
  }
  CHECK(code_of([&] { run_report(dir.str("run"), dir.str("out4")); }) ==
        ErrorCode::SchemaMismatch);
}

TEST_CASE("run_report tolerates a partial run directory") {
  TempDir dir;
  const std::string csv = planted_csv(dir, 19);
  AuditConfig cfg = audit_config(csv);
  run_select(cfg, dir.str("run"));

  const AuditOutcome rep = run_report(dir.str("run"), dir.str("out"));
  CHECK(rep.exit_code == 2);
  CHECK_FALSE(rep.warnings.empty());
  CHECK(fs::exists(dir.path / "out" / "selection.csv"));
  CHECK_FALSE(fs::exists(dir.path / "out" / "performance.csv"));
  CHECK(fs::exists(dir.path / "out" / "plot_data.json"));
  const json plot = json::parse(slurp(dir.path / "out" / "plot_data.json"));
  CHECK(plot.at("figures").empty());
}

TEST_CASE("run_single_cell reproduces a stored cell record byte-for-byte") {
  TempDir dir;
  const std::string csv = planted_csv(dir, 23);
  const AuditConfig cfg = audit_config(csv);
  run_audit(cfg, dir.str("run"), 1);

  const json summary = json::parse(slurp(dir.path / "run" / "summary.json"));
  const std::string model = summary.at("top3")[0].get<std::string>();

  const SweepCell cell = run_single_cell(dir.str("run"), model, 16, 1);
  const std::string record = cell_record_json(cell);

  std::istringstream lines(slurp(dir.path / "run" / "cells.jsonl"));
  std::string line, found;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const json c = json::parse(line);
    if (c.at("model") == model && c.at("size") == 16 && c.at("fold") == 1) {
      found = line;
      break;
    }
  }
  REQUIRE_FALSE(found.empty());
  CHECK(record == found);

  CHECK(code_of([&] { run_single_cell(dir.str("empty"), model, 16, 1); }) ==
        ErrorCode::MissingRun);
  TempDir partial;
  {
    std::ofstream out(partial.str("config.resolved.json"));
    out << config_to_json(cfg);
  }
  CHECK(code_of([&] {
          run_single_cell(partial.path.string(), model, 16, 1);
        }) == ErrorCode::MissingRun);
}
