#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tca {

struct BaActivity {
  std::string id;
  std::string category;
  std::string label;
};

/// Behavioral-activation activities grouped by category, plus the PANAS emotion labels
/// offered in the diary.
class BaCatalog {
 public:
  static BaCatalog from_json(std::string_view text);
  /// Catalog compiled from data/ba_activities.json.
  static const BaCatalog& builtin();

  std::span<const BaActivity> activities() const { return activities_; }
  std::span<const std::string> categories() const { return categories_; }
  std::span<const std::string> panas_labels() const { return panas_; }

  const BaActivity* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  bool is_panas_label(std::string_view label) const;

 private:
  std::vector<BaActivity> activities_;
  std::vector<std::string> categories_;
  std::vector<std::string> panas_;
};

}  // namespace tca
