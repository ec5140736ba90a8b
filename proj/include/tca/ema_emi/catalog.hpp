#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tca/protocol/records.hpp"

namespace tca {

struct EmiCell {
  Gender gender = Gender::female;
  AgeBand age_band = AgeBand::age_19_24;
  Severity severity = Severity::mild;
  bool operator==(const EmiCell&) const = default;
  auto operator<=>(const EmiCell&) const = default;
};

EmiCell cell_for(const ParticipantProfile& profile);

struct EmiCatalogEntry {
  EmiType type = EmiType::breathing;
  EmiFormat format = EmiFormat::long_video;
  EmiCell cell;
  int version = 1;
  std::string content_ref;
  bool operator==(const EmiCatalogEntry&) const = default;
};

class EmiCatalog {
 public:
  /// Throws schema on malformed files or entries that break the format rule.
  static EmiCatalog from_json(std::string_view text);
  static const EmiCatalog& builtin();

  std::span<const EmiCatalogEntry> entries() const { return entries_; }
  /// Entries for one (type, format, cell), sorted by version.
  std::vector<const EmiCatalogEntry*> versions(EmiType type, EmiFormat format, const EmiCell& cell) const;
  std::vector<EmiCell> populated_cells() const;
  bool has_cell(const EmiCell& cell) const;

 private:
  std::vector<EmiCatalogEntry> entries_;
};

/// Entry for the participant's cell. The version alternates with the parity of
/// `completed_emi_count` among the versions that exist for that cell.
/// Throws validation (illegal_format) for short text outside the three short types and
/// catalog_gap when the cell has no entry.
const EmiCatalogEntry& select_emi_content(const ParticipantProfile& profile, EmiType type, EmiFormat format,
                                          int completed_emi_count = 0,
                                          const EmiCatalog& catalog = EmiCatalog::builtin());

/// Every legal (type, format) pair that resolves for this participant.
std::vector<EmiOption> emi_options_for(const ParticipantProfile& profile,
                                       const EmiCatalog& catalog = EmiCatalog::builtin());

/// Long-video types that do not resolve for this participant (empty when complete).
std::vector<EmiType> catalog_gaps(const ParticipantProfile& profile, const EmiCatalog& catalog = EmiCatalog::builtin());

enum class EmiDuration { one_minute, five_minute };

struct EmiPromptParams {
  std::string gender;
  std::string age;
  std::string severity;
  std::string emi_type;
  EmiDuration duration = EmiDuration::one_minute;
};

/// Content-generation prompt for one EMI script. Throws templating on any empty field.
std::string render_emi_prompt(const EmiPromptParams& params);
EmiPromptParams emi_prompt_params(const ParticipantProfile& profile, EmiType type, EmiDuration duration);

/// Human-readable technique name ("body scan", "breathing", ...).
std::string_view emi_type_label(EmiType type);

}  // namespace tca

TCA_ENUM_NAMES(tca::EmiDuration, "one_minute"sv, "five_minute"sv);
