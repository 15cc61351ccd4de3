#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrad/imaging.hpp"

namespace mrad::cli {

/// Raised when a dataset directory does not follow the expected layout.
class LayoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LayoutRequirements {
  bool reference = true;  // every query needs a same-named reference
  bool labels = false;    // labels.csv must exist and cover every query
  bool masks = false;     // every anomalous query needs a mask
};

/// root/{query,reference,mask}/ plus root/labels.csv, paired by file name.
class DatasetLayout {
 public:
  static DatasetLayout open(const std::filesystem::path& root, const LayoutRequirements& req);

  const std::filesystem::path& root() const noexcept { return root_; }
  /// Query file names in lexicographic order.
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::filesystem::path query(const std::string& name) const { return root_ / "query" / name; }
  std::filesystem::path reference(const std::string& name) const {
    return root_ / "reference" / name;
  }
  std::filesystem::path mask(const std::string& name) const { return root_ / "mask" / name; }

  bool has_labels() const noexcept { return has_labels_; }
  bool has_mask(const std::string& name) const;
  /// False for unlabeled names.
  bool is_anomalous(const std::string& name) const;

  /// Ground truth for `name`: the mask file if present, otherwise all
  /// Background (normal images need no mask).
  LabelMask truth(const std::string& name, int width, int height) const;

 private:
  std::filesystem::path root_;
  std::vector<std::string> names_;
  std::map<std::string, bool> labels_;
  std::vector<std::string> masks_;  // sorted
  bool has_labels_ = false;
};

/// Parses labels.csv text ("filename,label" header, label in {normal,
/// anomalous}). Throws LayoutError naming the line on malformed input.
std::map<std::string, bool> parse_labels(const std::string& text);

}  // namespace mrad::cli
