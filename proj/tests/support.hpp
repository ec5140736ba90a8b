#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include "tca/protocol/records.hpp"
#include "tca/protocol/transition.hpp"
#include "tca/service/channel.hpp"

namespace tca::test {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tca-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Date date_of(int y, unsigned m, unsigned d) { return Date{std::chrono::year{y} / m / d}; }

// 2024-06-03 is a Monday.
inline Timestamp local(TimeZone tz, int day, int hour, int minute = 0) {
  return tz.at(date_of(2024, 6, 3) + days(day), ClockTime{hour, minute});
}

inline ParticipantProfile sample_profile(const std::string& id = "I01", Arm arm = Arm::intervention) {
  ParticipantProfile p;
  p.participant_id = id;
  p.nickname = "Mina";
  p.gender = Gender::female;
  p.age = 22;
  p.arm = arm;
  p.enrollment_date = date_of(2024, 6, 3);
  p.phq9_total = 8;
  p.severity_cell = Severity::mild;
  return p;
}

inline OnboardingConfig sample_config(bool reminders = true) {
  OnboardingConfig c;
  c.ema_times = {ClockTime{9, 0}, ClockTime{13, 30}, ClockTime{19, 0}};
  c.reminder_enabled = reminders;
  c.todo_time = ClockTime{8, 0};
  c.diary_time = ClockTime{22, 0};
  c.step_goal = 6000;
  c.ba_selected = {"contact_friend", "special_meal", "family_plans"};
  c.affirmation_text = "One step at a time.";
  return c;
}

inline ParticipantState enrolled_state(const ParticipantProfile& profile = sample_profile(),
                                       std::optional<OnboardingConfig> config = sample_config(),
                                       TimeZone tz = TimeZone{}) {
  Transition t{ParticipantState{}};
  t.append(tz.midnight(profile.enrollment_date), Enrolled{profile, std::move(config), tz});
  return t.state;
}

/// Fails the first `failures` deliveries with `result`, then succeeds.
class FlakyAdapter final : public ChannelAdapter {
 public:
  FlakyAdapter(int failures, DeliveryResult result) : failures_(failures), result_(result) {}
  DeliveryResult deliver(const OutboxMessage&) override {
    ++calls;
    if (failures_ > 0) {
      --failures_;
      return result_;
    }
    return DeliveryResult::ok;
  }
  int calls = 0;

 private:
  int failures_;
  DeliveryResult result_;
};

}  // namespace tca::test
