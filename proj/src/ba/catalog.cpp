#include "tca/ba/catalog.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "tca/core/embedded_data.hpp"
#include "tca/core/error.hpp"

namespace tca {

BaCatalog BaCatalog::from_json(std::string_view text) {
  BaCatalog out;
  try {
    auto j = nlohmann::json::parse(text);
    for (const auto& c : j.at("categories")) out.categories_.push_back(c.at("id").get<std::string>());
    std::set<std::string> ids;
    for (const auto& a : j.at("activities")) {
      BaActivity act{a.at("id").get<std::string>(), a.at("category").get<std::string>(),
                     a.at("label").get<std::string>()};
      if (std::find(out.categories_.begin(), out.categories_.end(), act.category) == out.categories_.end()) {
        fail(ErrorCode::schema, "activity '" + act.id + "' has unknown category '" + act.category + "'");
      }
      if (!ids.insert(act.id).second) fail(ErrorCode::schema, "duplicate activity id '" + act.id + "'");
      out.activities_.push_back(std::move(act));
    }
    for (const auto& p : j.at("panas_labels")) out.panas_.push_back(p.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("BA catalog: ") + e.what());
  }
  return out;
}

const BaCatalog& BaCatalog::builtin() {
  static const BaCatalog catalog = from_json(data::ba_activities);
  return catalog;
}

const BaActivity* BaCatalog::find(std::string_view id) const {
  auto it = std::find_if(activities_.begin(), activities_.end(), [&](const auto& a) { return a.id == id; });
  return it == activities_.end() ? nullptr : &*it;
}

bool BaCatalog::is_panas_label(std::string_view label) const {
  return std::find(panas_.begin(), panas_.end(), label) != panas_.end();
}

}  // namespace tca
