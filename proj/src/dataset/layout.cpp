#include "surgscan/dataset/layout.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

namespace surgscan::dataset {

namespace fs = std::filesystem;

namespace {

constexpr Split kSplits[] = {Split::Train, Split::Val};

void make_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + p.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(Errc::IoFailure, "short write to " + path.string());
}

std::string lower_ext(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

bool is_image_file(const fs::path& p) {
  const auto ext = lower_ext(p);
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

fs::path emit_dataset_config(const DatasetManifest& manifest, const fs::path& root) {
  manifest.validate(true);
  const auto class_map = manifest.class_map.empty() ? build_class_map(manifest.entries)
                                                    : manifest.class_map;
  for (Split s : kSplits) {
    make_dir(root / "images" / to_string(s));
    make_dir(root / "labels" / to_string(s));
  }

  for (const auto& e : manifest.entries) {
    const Split s = manifest.split.at(e.id);
    std::string ext = lower_ext(e.path);
    if (ext.empty()) ext = ".png";
    const fs::path image_dst = root / "images" / to_string(s) / (e.id + ext);
    std::error_code ec;
    if (!fs::equivalent(e.path, image_dst, ec)) {
      fs::copy_file(e.path, image_dst, fs::copy_options::overwrite_existing, ec);
      if (ec) throw Error(Errc::IoFailure, "cannot copy " + e.path + ": " + ec.message());
    }
    const auto records = label_records(e, class_map);
    write_label_file(records, e.id, root / "labels" / to_string(s));
  }

  DatasetManifest stored = manifest;
  stored.class_map = class_map;
  save_manifest(stored, root / kManifestRelPath);

  std::vector<std::pair<int, std::string>> names;
  for (const auto& [name, id] : class_map) names.emplace_back(id, name);
  std::sort(names.begin(), names.end());

  std::string cfg;
  cfg += "path: " + fs::absolute(root).lexically_normal().generic_string() + "\n";
  cfg += "train: images/train\n";
  cfg += "val: images/val\n";
  cfg += "nc: " + std::to_string(names.size()) + "\n";
  cfg += "names:\n";
  for (const auto& [id, name] : names) cfg += "  " + std::to_string(id) + ": " + name + "\n";
  const fs::path config_path = root / kConfigFileName;
  write_text(config_path, cfg);
  return config_path;
}

std::string_view to_string(Finding::Kind kind) {
  switch (kind) {
    case Finding::Kind::OrphanImage: return "orphan-image";
    case Finding::Kind::OrphanLabel: return "orphan-label";
    case Finding::Kind::MalformedLabel: return "malformed-label";
    case Finding::Kind::Leakage: return "leakage";
  }
  return "?";
}

std::size_t ValidationReport::count(Finding::Kind kind) const {
  return static_cast<std::size_t>(std::count_if(
      findings.begin(), findings.end(), [kind](const Finding& f) { return f.kind == kind; }));
}

ValidationReport validate_layout(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(Errc::IoFailure, "dataset root not found: " + root.string());
  ValidationReport report;

  std::set<std::string> augmented;
  std::map<std::string, std::set<std::string>> children;  // parent -> derivative ids
  if (fs::exists(root / kManifestRelPath)) {
    const auto manifest = load_manifest(root / kManifestRelPath);
    for (const auto& e : manifest.entries) {
      if (const auto* aug = std::get_if<AugmentedProvenance>(&e.provenance)) {
        augmented.insert(e.id);
        children[aug->parent_id].insert(e.id);
      }
    }
  }

  std::map<Split, std::map<std::string, fs::path>> images;
  for (Split s : kSplits) {
    const fs::path image_dir = root / "images" / to_string(s);
    const fs::path label_dir = root / "labels" / to_string(s);
    std::map<std::string, fs::path> labels;
    if (fs::is_directory(image_dir)) {
      for (const auto& item : fs::directory_iterator(image_dir)) {
        if (item.is_regular_file() && is_image_file(item.path())) {
          images[s][item.path().stem().string()] = item.path();
        }
      }
    }
    if (fs::is_directory(label_dir)) {
      for (const auto& item : fs::directory_iterator(label_dir)) {
        if (item.is_regular_file() && item.path().extension() == ".txt") {
          labels[item.path().stem().string()] = item.path();
        }
      }
    }
    for (const auto& [stem, path] : images[s]) {
      if (!labels.contains(stem)) {
        report.findings.push_back({Finding::Kind::OrphanImage, path.generic_string(),
                                   "no label file " + (label_dir / (stem + ".txt")).generic_string()});
      }
    }
    for (const auto& [stem, path] : labels) {
      if (!images[s].contains(stem)) {
        report.findings.push_back({Finding::Kind::OrphanLabel, path.generic_string(), "no matching image"});
      }
      try {
        parse_label_file(path);
      } catch (const LabelParseError& e) {
        report.findings.push_back({Finding::Kind::MalformedLabel, path.generic_string(), e.what()});
      }
    }
  }

  for (const auto& [stem, path] : images[Split::Val]) {
    if (augmented.contains(stem) || stem.find("__") != std::string::npos) {
      report.findings.push_back({Finding::Kind::Leakage, path.generic_string(),
                                 "augmented image in val"});
      continue;
    }
    auto kids = children.find(stem);
    if (kids == children.end()) continue;
    for (const auto& child : kids->second) {
      if (images[Split::Train].contains(child)) {
        report.findings.push_back({Finding::Kind::Leakage, path.generic_string(),
                                   "val original has train derivative " + child});
        break;
      }
    }
  }

  std::sort(report.findings.begin(), report.findings.end(),
            [](const Finding& a, const Finding& b) {
              return std::tie(a.kind, a.path) < std::tie(b.kind, b.path);
            });
  return report;
}

}  // namespace surgscan::dataset
