#include "surgscan/dataset/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "surgscan/codec.hpp"

namespace surgscan::dataset {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

int pixel_value(const pt::ptree& node, const char* key) {
  const auto raw = node.get_optional<std::string>(key);
  if (!raw) throw Error(Errc::MalformedLine, std::string("missing <") + key + ">");
  std::string text = *raw;
  text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }),
             text.end());
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw Error(Errc::MalformedLine, std::string("<") + key + "> is not a number: '" + *raw + "'");
  }
  return static_cast<int>(std::floor(v + 0.5));
}

std::string trimmed(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

AnnotatedImage parse_annotation_xml(std::string_view xml, const fs::path& images_dir) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(Errc::MalformedLine, std::string("xml: ") + e.what());
  }
  const auto root = tree.get_child_optional("annotation");
  if (!root) throw Error(Errc::MalformedLine, "missing <annotation> root");

  AnnotatedImage image;
  const auto filename = root->get_optional<std::string>("filename");
  if (!filename || trimmed(*filename).empty()) throw Error(Errc::MalformedLine, "missing <filename>");
  const fs::path file = trimmed(*filename);
  image.id = file.stem().string();
  image.path = (images_dir / file).string();

  const auto instrument = root->get_optional<std::string>("instrument");
  if (!instrument) throw Error(Errc::MalformedLine, "missing <instrument>");
  image.instrument = parse_instrument(trimmed(*instrument));

  if (const auto size = root->get_child_optional("size")) {
    image.width = pixel_value(*size, "width");
    image.height = pixel_value(*size, "height");
  } else {
    const auto raster = imaging::load_image(image.path);
    image.width = raster.width();
    image.height = raster.height();
  }
  if (image.width <= 0 || image.height <= 0) throw Error(Errc::MalformedLine, "non-positive <size>");

  for (const auto& [tag, node] : *root) {
    if (tag != "object") continue;
    const auto name = node.get_optional<std::string>("name");
    if (!name) throw Error(Errc::MalformedLine, "<object> without <name>");
    const auto box_node = node.get_child_optional("bndbox");
    if (!box_node) throw Error(Errc::MalformedLine, "<object> without <bndbox>");
    DefectAnnotation ann;
    ann.defect = parse_defect(trimmed(*name));
    ann.box = {pixel_value(*box_node, "xmin"), pixel_value(*box_node, "ymin"),
               pixel_value(*box_node, "xmax"), pixel_value(*box_node, "ymax")};
    validate_bbox(ann.box, image.width, image.height);
    image.defects.push_back(ann);
  }
  return image;
}

std::string format_annotation_xml(const AnnotatedImage& image) {
  std::ostringstream out;
  out << "<annotation>\n";
  out << "  <filename>" << fs::path(image.path).filename().string() << "</filename>\n";
  out << "  <instrument>" << to_string(image.instrument) << "</instrument>\n";
  out << "  <size><width>" << image.width << "</width><height>" << image.height
      << "</height></size>\n";
  for (const auto& d : image.defects) {
    out << "  <object>\n    <name>" << to_string(d.defect) << "</name>\n"
        << "    <bndbox><xmin>" << d.box.x_min << "</xmin><ymin>" << d.box.y_min << "</ymin><xmax>"
        << d.box.x_max << "</xmax><ymax>" << d.box.y_max << "</ymax></bndbox>\n  </object>\n";
  }
  out << "</annotation>\n";
  return out.str();
}

ConversionResult convert_annotations(const fs::path& annotations_dir, const fs::path& images_dir,
                                     const fs::path& labels_dir,
                                     const std::optional<std::map<std::string, int>>& class_map) {
  for (const auto& dir : {annotations_dir, images_dir}) {
    if (!fs::is_directory(dir)) throw Error(Errc::IoFailure, "directory not found: " + dir.string());
  }
  std::error_code ec;
  fs::create_directories(labels_dir, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + labels_dir.string());

  std::vector<fs::path> files;
  for (const auto& item : fs::directory_iterator(annotations_dir)) {
    if (item.is_regular_file() && item.path().extension() == ".xml") files.push_back(item.path());
  }
  std::sort(files.begin(), files.end());

  ConversionResult result;
  for (const auto& file : files) {
    try {
      std::ifstream in(file, std::ios::binary);
      if (!in) throw Error(Errc::IoFailure, "cannot open");
      std::ostringstream buf;
      buf << in.rdbuf();
      AnnotatedImage image = parse_annotation_xml(buf.str(), images_dir);
      if (!fs::exists(image.path)) throw Error(Errc::IoFailure, "image not found: " + image.path);
      if (result.manifest.find(image.id)) throw Error(Errc::InvalidArgument, "duplicate image id " + image.id);
      result.manifest.entries.push_back(std::move(image));
    } catch (const Error& e) {
      result.diagnostics.push_back({file.generic_string(), e.what()});
    }
  }

  result.manifest.class_map = class_map ? *class_map : build_class_map(result.manifest.entries);
  for (const auto& image : result.manifest.entries) {
    try {
      const auto records = label_records(image, result.manifest.class_map);
      write_label_file(records, image.id, labels_dir);
      ++result.images;
      result.boxes += records.size();
    } catch (const Error& e) {
      result.diagnostics.push_back({image.path, e.what()});
    }
  }
  return result;
}

}  // namespace surgscan::dataset
