#pragma once

#include <string_view>

// Data files compiled into the library (see data/).
namespace tca::data {

extern const std::string_view ba_activities;
extern const std::string_view emi_catalog;
extern const std::string_view calibration;
extern const std::string_view prompt_templates;

}  // namespace tca::data
