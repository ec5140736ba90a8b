#include "tca/ema_emi/catalog.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "tca/core/embedded_data.hpp"
#include "tca/core/error.hpp"
#include "tca/core/template.hpp"

namespace tca {

EmiCell cell_for(const ParticipantProfile& p) {
  return {p.gender, age_band_for(p.age), p.severity_cell};
}

EmiCatalog EmiCatalog::from_json(std::string_view text) {
  EmiCatalog out;
  try {
    auto j = nlohmann::json::parse(text);
    std::set<std::tuple<EmiType, EmiFormat, EmiCell, int>> seen;
    for (const auto& e : j.at("entries")) {
      EmiCatalogEntry entry;
      entry.type = parse_enum<EmiType>(e.at("type").get<std::string>());
      entry.format = parse_enum<EmiFormat>(e.at("format").get<std::string>());
      entry.cell.gender = parse_enum<Gender>(e.at("gender").get<std::string>());
      entry.cell.age_band = parse_enum<AgeBand>(e.at("age_band").get<std::string>());
      entry.cell.severity = parse_enum<Severity>(e.at("severity").get<std::string>());
      entry.version = e.at("version").get<int>();
      entry.content_ref = e.at("content_ref").get<std::string>();
      if (!is_legal_emi_option({entry.type, entry.format})) {
        fail(ErrorCode::schema, "catalog lists short text for " + std::string(to_string(entry.type)));
      }
      if (entry.version != 1 && entry.version != 2) fail(ErrorCode::schema, "catalog version must be 1 or 2");
      if (entry.content_ref.empty()) fail(ErrorCode::schema, "catalog entry without content_ref");
      if (!seen.emplace(entry.type, entry.format, entry.cell, entry.version).second) {
        fail(ErrorCode::schema, "duplicate catalog entry " + entry.content_ref);
      }
      out.entries_.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("EMI catalog: ") + e.what());
  }
  return out;
}

const EmiCatalog& EmiCatalog::builtin() {
  static const EmiCatalog catalog = from_json(data::emi_catalog);
  return catalog;
}

std::vector<const EmiCatalogEntry*> EmiCatalog::versions(EmiType type, EmiFormat format, const EmiCell& cell) const {
  std::vector<const EmiCatalogEntry*> out;
  for (const auto& e : entries_) {
    if (e.type == type && e.format == format && e.cell == cell) out.push_back(&e);
  }
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->version < b->version; });
  return out;
}

std::vector<EmiCell> EmiCatalog::populated_cells() const {
  std::set<EmiCell> cells;
  for (const auto& e : entries_) cells.insert(e.cell);
  return {cells.begin(), cells.end()};
}

bool EmiCatalog::has_cell(const EmiCell& cell) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.cell == cell; });
}

const EmiCatalogEntry& select_emi_content(const ParticipantProfile& profile, EmiType type, EmiFormat format,
                                          int completed_emi_count, const EmiCatalog& catalog) {
  if (!is_legal_emi_option({type, format})) {
    fail(ErrorCode::validation, "illegal_format: " + std::string(to_string(type)) + " has no short text");
  }
  auto cell = cell_for(profile);
  auto found = catalog.versions(type, format, cell);
  if (found.empty()) {
    fail(ErrorCode::catalog_gap, "no " + std::string(to_string(format)) + " " + std::string(to_string(type)) +
                                     " content for cell (" + std::string(to_string(cell.gender)) + ", " +
                                     std::string(to_string(cell.age_band)) + ", " +
                                     std::string(to_string(cell.severity)) + ")");
  }
  return *found[static_cast<std::size_t>(completed_emi_count) % found.size()];
}

std::vector<EmiOption> emi_options_for(const ParticipantProfile& profile, const EmiCatalog& catalog) {
  std::vector<EmiOption> out;
  auto cell = cell_for(profile);
  for (std::size_t f = 0; f < enum_count<EmiFormat>(); ++f) {
    for (std::size_t t = 0; t < enum_count<EmiType>(); ++t) {
      EmiOption o{static_cast<EmiType>(t), static_cast<EmiFormat>(f)};
      if (is_legal_emi_option(o) && !catalog.versions(o.type, o.format, cell).empty()) out.push_back(o);
    }
  }
  return out;
}

std::vector<EmiType> catalog_gaps(const ParticipantProfile& profile, const EmiCatalog& catalog) {
  std::vector<EmiType> out;
  auto cell = cell_for(profile);
  for (std::size_t t = 0; t < enum_count<EmiType>(); ++t) {
    auto type = static_cast<EmiType>(t);
    if (catalog.versions(type, EmiFormat::long_video, cell).empty()) out.push_back(type);
  }
  return out;
}

std::string_view emi_type_label(EmiType type) {
  switch (type) {
    case EmiType::walking: return "walking meditation";
    case EmiType::body_scan: return "body scan meditation";
    case EmiType::mindful_eating: return "mindful eating meditation";
    case EmiType::breathing: return "breathing meditation";
    case EmiType::rumination_journaling: return "rumination journaling";
  }
  return "";
}

std::string render_emi_prompt(const EmiPromptParams& p) {
  auto name = p.duration == EmiDuration::one_minute ? "emi_short" : "emi_long";
  return render_template(prompt_template(name), {{"gender", p.gender},
                                                  {"age", p.age},
                                                  {"severity", p.severity},
                                                  {"emi_type", p.emi_type}});
}

EmiPromptParams emi_prompt_params(const ParticipantProfile& profile, EmiType type, EmiDuration duration) {
  return {std::string(to_string(profile.gender)), std::to_string(profile.age),
          std::string(to_string(profile.severity_cell)), std::string(emi_type_label(type)), duration};
}

}  // namespace tca
