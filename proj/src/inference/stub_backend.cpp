#include "surgscan/inference/stub_backend.hpp"

#include <fstream>

#include "json.hpp"
#include "surgscan/codec.hpp"
#include "surgscan/inference/cascade.hpp"

namespace surgscan::inference {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr std::string_view kSuffix = ".tags.json";
}

fs::path tags_path_for(const fs::path& image) { return fs::path(image.string() + std::string(kSuffix)); }

void write_fixture_tags(const fs::path& image, const FixtureTags& tags) {
  json defects = json::array();
  for (const auto& [defect, confidence] : tags.defects) {
    defects.push_back({{"class", to_string(defect)}, {"confidence", confidence}});
  }
  const json j = {{"instrument", to_string(tags.instrument)},
                  {"instrument_confidence", tags.instrument_confidence},
                  {"defects", std::move(defects)}};
  std::ofstream out(tags_path_for(image), std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write tags for " + image.string());
  out << j.dump(2) << '\n';
}

FixtureTags read_fixture_tags(const fs::path& tags_file) {
  std::ifstream in(tags_file);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + tags_file.string());
  try {
    const json j = json::parse(in);
    FixtureTags tags;
    tags.instrument = parse_instrument(j.at("instrument").get<std::string>());
    tags.instrument_confidence = j.value("instrument_confidence", 1.0);
    if (j.contains("defects")) {
      for (const auto& d : j.at("defects")) {
        tags.defects.emplace_back(parse_defect(d.at("class").get<std::string>()), d.value("confidence", 1.0));
      }
    }
    return tags;
  } catch (const json::exception& e) {
    throw Error(Errc::BackendFailure, tags_file.string() + ": " + e.what());
  }
}

FixtureTagIndex::FixtureTagIndex(const std::vector<fs::path>& fixture_dirs) {
  for (const auto& dir : fixture_dirs) add_directory(dir);
}

void FixtureTagIndex::add_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(Errc::IoFailure, "fixture directory not found: " + dir.string());
  for (const auto& item : fs::recursive_directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    const std::string name = item.path().string();
    if (name.size() <= kSuffix.size() || !name.ends_with(kSuffix)) continue;
    const fs::path image = name.substr(0, name.size() - kSuffix.size());
    if (!fs::exists(image)) continue;
    add(sha256_hex(imaging::read_file_bytes(image)), read_fixture_tags(item.path()));
  }
}

void FixtureTagIndex::add(const std::string& content_digest, FixtureTags tags) {
  by_digest_[content_digest] = std::move(tags);
}

FixtureTags FixtureTagIndex::lookup(const InspectionInput& input) const {
  if (!input.source.empty()) {
    const fs::path sidecar = tags_path_for(input.source);
    if (fs::exists(sidecar)) return read_fixture_tags(sidecar);
  }
  if (!input.content_digest.empty()) {
    auto it = by_digest_.find(input.content_digest);
    if (it != by_digest_.end()) return it->second;
  }
  throw Error(Errc::BackendFailure, "no fixture tags for image '" + input.source.string() + "'");
}

std::vector<ClassifierVerdict> StubInstrumentBackend::run(const InspectionInput& input) {
  const FixtureTags tags = index_->lookup(input);
  return {{std::string(to_string(tags.instrument)), tags.instrument_confidence}};
}

std::vector<ClassifierVerdict> StubDefectBackend::run(const InspectionInput& input) {
  const FixtureTags tags = index_->lookup(input);
  std::vector<ClassifierVerdict> out;
  for (const auto& [defect, confidence] : tags.defects) {
    out.push_back({std::string(to_string(defect)), confidence});
  }
  return out;
}

void register_stub_backends(BackendRegistry& registry, CascadeConfig& cfg,
                            std::shared_ptr<const FixtureTagIndex> index) {
  registry.register_backend("stub-instrument", BackendKind::stage1(),
                            std::make_shared<StubInstrumentBackend>(index));
  cfg.instrument_backend = "stub-instrument";
  for (InstrumentClass c : kAllInstruments) {
    const std::string id = "stub-defect-" + std::string(to_string(c));
    registry.register_backend(id, BackendKind::stage2(c), std::make_shared<StubDefectBackend>(index));
    cfg.defect_backends[c] = id;
  }
}

}  // namespace surgscan::inference
