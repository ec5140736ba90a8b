#pragma once

// Hand-worked mission verdicts over constructed week ledgers.

#include <initializer_list>
#include <string>
#include <vector>

#include "tca/gamification/engine.hpp"

namespace tca::test {

struct MissionCase {
  std::string name;
  MissionRule rule;
  WeekLedger week;
  bool passed;
};

// Items are given as a string over "wtsdb" (wash, todo, steps, diary, ba).
inline WeekDay make_day(const std::string& items, std::vector<std::string> ba = {}) {
  WeekDay d;
  static const std::string codes = "wtsdb";
  for (char c : items) d.ledger.set(static_cast<RoutineItem>(codes.find(c)), true);
  d.ba_done = std::move(ba);
  return d;
}

inline WeekLedger repeat_day(const WeekDay& d, int n = 7) { return WeekLedger{std::vector<WeekDay>(n, d)}; }

inline WeekLedger week_of(std::initializer_list<WeekDay> days) { return WeekLedger{days}; }

inline std::vector<MissionCase> mission_cases() {
  const std::vector<std::string> ba{"special_meal", "contact_friend", "family_plans", "learn_something",
                                    "read_newspaper", "cook_own_dish", "walk_outside"};
  auto distinct = [&](const std::string& items) {
    WeekLedger w;
    for (const auto& id : ba) w.days.push_back(make_day(items, {id}));
    return w;
  };

  std::vector<MissionCase> out;
  out.push_back({"one item every day", MissionRule::routines_daily_1, repeat_day(make_day("w")), true});
  {
    auto w = repeat_day(make_day("d"));
    w.days[6] = make_day("");
    out.push_back({"one empty Sunday", MissionRule::routines_daily_1, w, false});
  }
  out.push_back({"two items every day", MissionRule::routines_daily_2, repeat_day(make_day("wt")), true});
  {
    auto w = repeat_day(make_day("ts"));
    w.days[2] = make_day("s");
    out.push_back({"one day with one item", MissionRule::routines_daily_2, w, false});
  }
  out.push_back({"three items without BA", MissionRule::routines_daily_3, repeat_day(make_day("wtd")), true});
  {
    auto w = repeat_day(make_day("wtb", {"special_meal"}));
    w.days[3] = make_day("wtd");
    out.push_back({"three items but one day without BA", MissionRule::three_daily_incl_ba, w, false});
  }
  out.push_back({"three items with the same BA daily", MissionRule::three_daily_incl_ba,
                 repeat_day(make_day("tdb", {"special_meal"})), true});
  out.push_back({"seven different BAs", MissionRule::three_daily_distinct_ba, distinct("wdb"), true});
  {
    auto w = distinct("wdb");
    w.days[4].ba_done = {"cook_own_dish"};
    out.push_back({"cooking on two days", MissionRule::three_daily_distinct_ba, w, false});
  }
  out.push_back({"everything with different BAs", MissionRule::all_routines_distinct_ba, distinct("wtsdb"), true});
  {
    auto w = distinct("wtsdb");
    w.days[5] = make_day("wtdb", {ba[5]});
    out.push_back({"one missing step goal", MissionRule::all_routines_distinct_ba, w, false});
  }
  {
    // Day 1 did two BAs; assigning the second one to it frees the first for day 2.
    auto w = distinct("wsb");
    w.days[0].ba_done = {ba[1], ba[0]};
    w.days[1].ba_done = {ba[1]};
    out.push_back({"distinct assignment through a two-BA day", MissionRule::three_daily_distinct_ba, w, true});
  }
  return out;
}

inline Mission mission_with(MissionRule rule) {
  for (int level = 0; level < kMaxLevel; ++level) {
    auto m = mission_for_level(level);
    if (m->rule == rule) return *m;
  }
  return {};
}

}  // namespace tca::test
