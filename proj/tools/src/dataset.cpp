#include "mrad/cli/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace mrad::cli {
namespace fs = std::filesystem;
namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> png_files(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (lower(entry.path().extension().string()) != ".png") continue;
    out.push_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::map<std::string, bool> parse_labels(const std::string& text) {
  std::map<std::string, bool> labels;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw LayoutError("labels.csv line " + std::to_string(line_no) + ": expected 'filename,label'");
    }
    const std::string file = trim(line.substr(0, comma));
    const std::string label = lower(trim(line.substr(comma + 1)));
    if (!header_seen) {
      header_seen = true;
      if (lower(file) == "filename") continue;
    }
    bool anomalous;
    if (label == "anomalous") {
      anomalous = true;
    } else if (label == "normal") {
      anomalous = false;
    } else {
      throw LayoutError("labels.csv line " + std::to_string(line_no) + ": label '" + label +
                        "' for '" + file + "' is neither normal nor anomalous");
    }
    if (!labels.emplace(file, anomalous).second) {
      throw LayoutError("labels.csv line " + std::to_string(line_no) + ": duplicate entry '" + file + "'");
    }
  }
  return labels;
}

DatasetLayout DatasetLayout::open(const fs::path& root, const LayoutRequirements& req) {
  DatasetLayout layout;
  layout.root_ = root;
  if (!fs::is_directory(root / "query")) {
    throw LayoutError("'" + (root / "query").string() + "' is not a directory");
  }
  layout.names_ = png_files(root / "query");
  if (layout.names_.empty()) throw LayoutError("no PNG files in '" + (root / "query").string() + "'");

  if (req.reference) {
    if (!fs::is_directory(root / "reference")) {
      throw LayoutError("'" + (root / "reference").string() + "' is not a directory");
    }
    for (const std::string& name : layout.names_) {
      if (!fs::is_regular_file(layout.reference(name))) {
        throw LayoutError("missing reference for '" + name + "': " + layout.reference(name).string());
      }
    }
  }

  const fs::path labels_path = root / "labels.csv";
  if (fs::is_regular_file(labels_path)) {
    std::ifstream in(labels_path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    layout.labels_ = parse_labels(text.str());
    layout.has_labels_ = true;
    for (const auto& [file, anomalous] : layout.labels_) {
      if (!std::binary_search(layout.names_.begin(), layout.names_.end(), file)) {
        throw LayoutError("labels.csv names '" + file + "' which is not in query/");
      }
    }
  } else if (req.labels) {
    throw LayoutError("missing '" + labels_path.string() + "'");
  }
  if (req.labels) {
    for (const std::string& name : layout.names_) {
      if (!layout.labels_.contains(name)) throw LayoutError("labels.csv has no entry for '" + name + "'");
    }
  }

  if (fs::is_directory(root / "mask")) layout.masks_ = png_files(root / "mask");
  if (req.masks) {
    for (const std::string& name : layout.names_) {
      if (layout.is_anomalous(name) && !layout.has_mask(name)) {
        throw LayoutError("anomalous image '" + name + "' has no mask: " + layout.mask(name).string());
      }
    }
  }
  return layout;
}

bool DatasetLayout::has_mask(const std::string& name) const {
  return std::binary_search(masks_.begin(), masks_.end(), name);
}

bool DatasetLayout::is_anomalous(const std::string& name) const {
  const auto it = labels_.find(name);
  return it != labels_.end() && it->second;
}

LabelMask DatasetLayout::truth(const std::string& name, int width, int height) const {
  if (!has_mask(name)) return LabelMask(width, height, Label::Background);
  LabelMask mask = load_mask(this->mask(name));
  if (mask.width() != width || mask.height() != height) {
    throw LayoutError("mask '" + name + "' is " + std::to_string(mask.width()) + "x" +
                      std::to_string(mask.height()) + " but the query is " + std::to_string(width) +
                      "x" + std::to_string(height));
  }
  return mask;
}

}  // namespace mrad::cli
