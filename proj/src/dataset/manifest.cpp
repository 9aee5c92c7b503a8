#include "surgscan/dataset/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace surgscan::dataset {

using nlohmann::json;

std::string_view to_string(Split s) { return s == Split::Train ? "train" : "val"; }

Split parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  throw Error(Errc::InvalidArgument, "unknown split '" + std::string(s) + "'");
}

const AnnotatedImage* DatasetManifest::find(std::string_view id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

void DatasetManifest::validate(bool require_split) const {
  std::map<std::string_view, const AnnotatedImage*> by_id;
  for (const auto& e : entries) {
    if (e.id.empty()) throw Error(Errc::InvalidArgument, "manifest entry with empty id");
    if (!by_id.emplace(e.id, &e).second) {
      throw Error(Errc::InvalidArgument, "duplicate image id '" + e.id + "'");
    }
    validate_annotated_image(e);
  }
  for (const auto& e : entries) {
    const auto* aug = std::get_if<AugmentedProvenance>(&e.provenance);
    if (!aug) continue;
    auto parent = by_id.find(aug->parent_id);
    if (parent == by_id.end() || !parent->second->is_original()) {
      throw Error(Errc::InvalidArgument,
                  "augmented entry '" + e.id + "' references missing original '" + aug->parent_id + "'");
    }
    if (require_split) {
      auto own = split.find(e.id);
      auto par = split.find(aug->parent_id);
      if ((own != split.end() && own->second == Split::Val) ||
          (par != split.end() && par->second == Split::Val)) {
        throw Error(Errc::InvalidArgument, "augmentation leakage into val via '" + e.id + "'");
      }
    }
  }
  if (require_split) {
    for (const auto& e : entries) {
      if (!split.contains(e.id)) throw Error(Errc::NotSplit, "no split assigned to '" + e.id + "'");
    }
  }
}

std::map<std::string, int> build_class_map(const std::vector<AnnotatedImage>& entries) {
  std::set<std::string> names;
  for (const auto& e : entries) {
    for (const auto& d : e.defects) {
      if (d.defect != DefectClass::NonDefective) names.emplace(to_string(d.defect));
    }
  }
  std::map<std::string, int> out;
  int next = 0;
  for (const auto& n : names) out.emplace(n, next++);
  return out;
}

std::vector<LabelRecord> label_records(const AnnotatedImage& image,
                                       const std::map<std::string, int>& class_map) {
  std::vector<LabelRecord> records;
  for (const auto& d : image.defects) {
    if (d.defect == DefectClass::NonDefective) continue;
    auto it = class_map.find(std::string(to_string(d.defect)));
    if (it == class_map.end()) {
      throw Error(Errc::UnknownLabel, "class '" + std::string(to_string(d.defect)) +
                                          "' missing from class map");
    }
    records.push_back(to_normalized(d.box, it->second, image.width, image.height));
  }
  return records;
}

namespace {

json entry_to_json(const AnnotatedImage& e, const DatasetManifest& m) {
  json defects = json::array();
  for (const auto& d : e.defects) {
    defects.push_back({{"class", to_string(d.defect)},
                       {"box", {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max}}});
  }
  json j = {{"id", e.id},
            {"path", e.path},
            {"width", e.width},
            {"height", e.height},
            {"instrument", to_string(e.instrument)},
            {"defects", std::move(defects)}};
  if (const auto* aug = std::get_if<AugmentedProvenance>(&e.provenance)) {
    j["provenance"] = {{"kind", "augmented"}, {"parent", aug->parent_id}, {"transform", aug->transform}};
  } else {
    j["provenance"] = {{"kind", "original"}};
  }
  if (auto it = m.split.find(e.id); it != m.split.end()) j["split"] = to_string(it->second);
  return j;
}

AnnotatedImage entry_from_json(const json& j) {
  AnnotatedImage e;
  e.id = j.at("id").get<std::string>();
  e.path = j.at("path").get<std::string>();
  e.width = j.at("width").get<int>();
  e.height = j.at("height").get<int>();
  e.instrument = parse_instrument(j.at("instrument").get<std::string>());
  for (const auto& d : j.at("defects")) {
    const auto& b = d.at("box");
    e.defects.push_back({parse_defect(d.at("class").get<std::string>()),
                         {b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(), b.at(3).get<int>()}});
  }
  const auto& p = j.at("provenance");
  if (p.at("kind") == "augmented") {
    e.provenance = AugmentedProvenance{p.at("parent").get<std::string>(),
                                       p.at("transform").get<std::string>()};
  }
  return e;
}

}  // namespace

std::string serialize_manifest(const DatasetManifest& manifest) {
  std::string out;
  json header = {{"format", "surgscan-manifest"}, {"version", 1}, {"class_map", manifest.class_map}};
  out += header.dump();
  out += '\n';
  for (const auto& e : manifest.entries) {
    out += entry_to_json(e, manifest).dump();
    out += '\n';
  }
  return out;
}

DatasetManifest parse_manifest(std::string_view text) {
  DatasetManifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        if (j.value("format", "") != "surgscan-manifest") {
          throw Error(Errc::MalformedLine, "missing manifest header");
        }
        m.class_map = j.at("class_map").get<std::map<std::string, int>>();
        have_header = true;
        continue;
      }
      AnnotatedImage e = entry_from_json(j);
      if (j.contains("split")) m.split[e.id] = parse_split(j.at("split").get<std::string>());
      m.entries.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw LabelParseError(Errc::MalformedLine, line_no, std::string("manifest: ") + ex.what());
    } catch (const LabelParseError&) {
      throw;
    } catch (const Error& ex) {
      throw LabelParseError(ex.code(), line_no, std::string("manifest: ") + ex.what());
    }
  }
  if (!have_header) throw Error(Errc::MalformedLine, "empty manifest");
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  out << serialize_manifest(manifest);
  if (!out) throw Error(Errc::IoFailure, "short write to " + path.string());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

}  // namespace surgscan::dataset
