#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "model_impls.hpp"
#include "rashomon/errors.hpp"
#include "rashomon/rng.hpp"

namespace rashomon {

namespace detail {

Fitted model_from_state(Family family, const ModelState& state) {
  switch (family) {
    case Family::lr:
    case Family::ridge:
    case Family::svm:
    case Family::lda:
      return LinearScoreModel::from_state(state);
    case Family::qda: return QdaModel::from_state(state);
    case Family::nb: return NbModel::from_state(state);
    case Family::dt:
    case Family::rf:
    case Family::et:
      return ForestModel::from_state(state);
    case Family::ada: return AdaModel::from_state(state);
    case Family::gbc: return GbcModel::from_state(state);
    case Family::knn: return KnnModel::from_state(state);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown family");
}

}  // namespace detail

namespace {

constexpr char kMagic[8] = {'R', 'S', 'H', 'M', 'D', 'L', '0', '1'};

nlohmann::json spec_to_json(const ModelSpec& spec) {
  nlohmann::json j;
  j["family"] = family_name(spec.family);
  j["hyperparams"] = nlohmann::json::object();
  for (const auto& [name, value] : spec.hyperparams) j["hyperparams"][name] = value;
  j["seed"] = spec.seed;
  return j;
}

ModelSpec spec_from_json(const nlohmann::json& j) {
  ModelSpec spec;
  spec.family = family_from_name(j.at("family").get<std::string>());
  for (const auto& [name, value] : j.at("hyperparams").items()) {
    spec.hyperparams[name] = value.get<double>();
  }
  spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

}  // namespace

void save_model(const TrainedModel& m, const std::string& path) {
  ModelState state;
  m.impl->save(state);
  if (!m.scale_mean.empty()) {
    state.arrays["scale_mean"] = m.scale_mean;
    state.arrays["scale_sd"] = m.scale_sd;
  }

  nlohmann::json header;
  header["schema_version"] = 1;
  header["spec"] = spec_to_json(m.spec);
  header["features"] = m.features;
  header["class_prior"] = m.class_prior;
  header["repaired"] = m.repaired;
  header["warnings"] = m.warnings;
  auto arrays = nlohmann::json::array();
  for (const auto& [name, values] : state.arrays) {
    arrays.push_back({{"name", name}, {"count", values.size()}});
  }
  header["arrays"] = arrays;

  std::string header_text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  std::uint32_t len = static_cast<std::uint32_t>(header_text.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const auto& [name, values] : state.arrays) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::SchemaMismatch, "not a model file: " + path);
  }
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string header_text(len, '\0');
  in.read(header_text.data(), len);
  if (!in) throw Error(ErrorCode::SchemaMismatch, "truncated model header");

  nlohmann::json header = nlohmann::json::parse(header_text, nullptr, false);
  if (header.is_discarded() || header.value("schema_version", 0) != 1) {
    throw Error(ErrorCode::SchemaMismatch, "unsupported model header");
  }

  ModelState state;
  for (const auto& entry : header.at("arrays")) {
    std::string name = entry.at("name").get<std::string>();
    std::size_t count = entry.at("count").get<std::size_t>();
    std::vector<double> values(count);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw Error(ErrorCode::SchemaMismatch, "truncated model arrays");
    state.arrays[name] = std::move(values);
  }

  TrainedModel m;
  m.spec = spec_from_json(header.at("spec"));
  m.features = header.at("features").get<std::size_t>();
  m.class_prior = header.at("class_prior").get<double>();
  m.repaired = header.at("repaired").get<bool>();
  m.warnings = header.at("warnings").get<std::vector<std::string>>();
  if (state.arrays.count("scale_mean")) {
    m.scale_mean = state.arrays.at("scale_mean");
    m.scale_sd = state.arrays.at("scale_sd");
    state.arrays.erase("scale_mean");
    state.arrays.erase("scale_sd");
  }
  m.impl = detail::model_from_state(m.spec.family, state);
  return m;
}

std::string model_cache_key(const ModelSpec& spec, std::uint64_t data_digest) {
  std::string canon = spec_to_json(spec).dump();
  std::uint64_t h = fnv1a(canon);
  h = fnv1a(&data_digest, sizeof(data_digest), h);
  std::ostringstream hex;
  hex << std::hex;
  for (int shift = 60; shift >= 0; shift -= 4) hex << ((h >> shift) & 0xf);
  return hex.str();
}

}  // namespace rashomon
