#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tca/analytics/compliance.hpp"
#include "tca/analytics/outcomes.hpp"
#include "tca/core/error.hpp"
#include "tca/protocol/json.hpp"
#include "tca/service/http.hpp"
#include "tca/simulator/simulator.hpp"

using namespace tca;
namespace fs = std::filesystem;

namespace {

std::atomic<httplib::Server*> g_server{nullptr};

Json read_json(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::storage, "cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, path + ": " + e.what());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::storage, "cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  out << text;
  require(out.good(), ErrorCode::storage, "cannot write " + path);
}

// Opens the study with the clock it was initialized with.
struct OpenStudy {
  StudySettings settings;
  SystemClock system;
  std::unique_ptr<SimulatedClock> simulated;
  std::ostringstream sink;
  std::unique_ptr<FileAdapter> adapter;
  std::unique_ptr<StudyService> service;

  explicit OpenStudy(const fs::path& dir) : settings(load_study_settings(dir)) {
    adapter = std::make_unique<FileAdapter>(StudyPaths{dir}.deliveries());
    Clock* clock = &system;
    if (settings.clock == ClockKind::simulated) {
      simulated = std::make_unique<SimulatedClock>(settings.start);
      clock = simulated.get();
    }
    service = std::make_unique<StudyService>(dir, *clock, *adapter);
    if (simulated) {
      if (auto saved = service->saved_clock()) simulated->set(std::max(*saved, settings.start));
    }
  }
};

std::vector<ParticipantState> replay_all(const StudyService& service) {
  std::vector<ParticipantState> out;
  for (const auto& id : service.participants()) out.push_back(service.state(id));
  return out;
}

Instrument measure_instrument(const std::string& m) {
  if (m == "bdi") return Instrument::BDI2;
  if (m == "gad") return Instrument::GAD7;
  if (m == "qlesq") return Instrument::QLESQ_SF;
  fail(ErrorCode::validation, "unknown measure " + m);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-sourced engine for the companion-agent study protocol"};
  app.require_subcommand(1);
  std::string study = "study";
  app.add_option("--study", study, "Study directory")->capture_default_str();

  auto* init = app.add_subcommand("init", "Create a study directory from a settings file");
  std::string config_file;
  init->add_option("--config", config_file, "Study settings JSON")->required()->check(CLI::ExistingFile);

  auto* enroll = app.add_subcommand("enroll", "Enroll a participant");
  std::string profile_file;
  enroll->add_option("--profile", profile_file, "JSON with profile and optional config")
      ->required()
      ->check(CLI::ExistingFile);

  auto* tick = app.add_subcommand("tick", "Advance the engine to a time");
  std::string until;
  tick->add_option("--until", until, "ISO-8601 timestamp with offset")->required();

  auto* simulate = app.add_subcommand("simulate", "Generate a seeded cohort into a new study directory");
  std::uint64_t seed = 1;
  int n_per_arm = 29, weeks = 6;
  std::string calibration_file, out_dir;
  simulate->add_option("--seed", seed)->capture_default_str();
  simulate->add_option("--n-per-arm", n_per_arm)->capture_default_str();
  simulate->add_option("--weeks", weeks)->capture_default_str()->check(CLI::Range(1, 6));
  simulate->add_option("--calibration", calibration_file)->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir)->required();

  auto* compliance = app.add_subcommand("compliance", "Weekly compliance table");
  std::string out_file = "-", format = "csv";
  compliance->add_option("--out", out_file)->capture_default_str();
  compliance->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  auto* stats = app.add_subcommand("stats", "Outcome analysis for one measure");
  std::string measure;
  stats->add_option("--measure", measure)->required()->check(CLI::IsMember({"bdi", "gad", "qlesq"}));
  stats->add_option("--out", out_file)->capture_default_str();

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  int port = 8080;
  std::string mode;
  int tick_seconds = 30;
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--mode", mode)->check(CLI::IsMember({"autopilot", "wizard"}));
  serve->add_option("--tick-seconds", tick_seconds, "Tick interval on the system clock")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*init) {
      auto settings = decode<StudySettings>(read_json(config_file), "settings");
      init_study(study, settings);
      std::cout << "initialized " << study << "\n";
    } else if (*enroll) {
      OpenStudy s(study);
      auto j = read_json(profile_file);
      auto profile = decode<ParticipantProfile>(j.at("profile"), "profile");
      std::optional<OnboardingConfig> config;
      if (j.contains("config") && !j.at("config").is_null()) config = decode<OnboardingConfig>(j.at("config"), "config");
      std::optional<Timestamp> at;
      if (j.contains("at")) at = decode<Timestamp>(j.at("at"), "at");
      auto state = s.service->enroll(profile, config, at);
      std::cout << "enrolled " << state.profile.participant_id << "\n";
    } else if (*tick) {
      OpenStudy s(study);
      auto t = parse_iso(until);
      if (s.simulated) s.simulated->set(t);
      auto r = s.service->tick(t);
      std::cout << fmt::format("tick {}: materialized {} dispatched {} failed {} expired {} settled {}\n",
                               format_iso(r.now, s.settings.timezone), r.materialized, r.dispatched, r.failed,
                               r.expired_offers, r.settlements);
    } else if (*simulate) {
      auto calibration = calibration_file.empty() ? builtin_calibration() : load_calibration(read_text(calibration_file));
      auto cfg = SimConfig::with_n_per_arm(seed, n_per_arm, calibration);
      cfg.weeks = weeks;
      auto result = simulate_cohort(cfg);
      StudySettings settings;
      settings.timezone = cfg.timezone;
      settings.start = cfg.timezone.midnight(cfg.enrollment_date);
      init_study(out_dir, settings);
      EventStore store(StudyPaths{out_dir}.events(), cfg.timezone);
      std::size_t events = 0;
      for (const auto& p : result.participants) {
        store.append(p.profile.participant_id, 0, p.events);
        events += p.events.size();
      }
      std::cout << fmt::format("wrote {} participants, {} events to {}\n", result.participants.size(), events, out_dir);
    } else if (*compliance) {
      OpenStudy s(study);
      std::vector<ComplianceWeekSummary> rows;
      for (const auto& state : replay_all(*s.service)) {
        if (!state.in_intervention()) continue;
        for (const auto& w : elapsed_week_compliance(state, std::max(state.last_at, s.service->now()))) {
          rows.push_back(w);
        }
      }
      require(!rows.empty(), ErrorCode::validation, "no elapsed intervention weeks in " + study);
      auto table = cohort_table(rows);
      write_text(out_file, format == "csv" ? cohort_table_csv(table) : cohort_table_json(table) + "\n");
    } else if (*stats) {
      OpenStudy s(study);
      auto states = replay_all(*s.service);
      write_text(out_file, outcome_report_json(states, measure_instrument(measure)) + "\n");
    } else if (*serve) {
      OpenStudy s(study);
      if (!mode.empty()) s.service->set_mode(parse_enum<RunMode>(mode));
      httplib::Server server;
      install_routes(server, *s.service, s.simulated.get());
      g_server = &server;
      std::signal(SIGINT, [](int) {
        if (auto* srv = g_server.load()) srv->stop();
      });
      std::signal(SIGTERM, [](int) {
        if (auto* srv = g_server.load()) srv->stop();
      });
      std::atomic<bool> running{true};
      std::thread ticker;
      if (!s.simulated) {
        ticker = std::thread([&] {
          while (running) {
            try {
              s.service->tick();
            } catch (const std::exception& e) {
              std::cerr << "tick failed: " << e.what() << "\n";
            }
            for (int i = 0; i < tick_seconds * 10 && running; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(100));
          }
        });
      }
      std::cout << fmt::format("serving {} on port {} ({})\n", study, port, to_string(s.service->settings().mode));
      std::cout.flush();
      bool ok = server.listen("0.0.0.0", port);
      running = false;
      if (ticker.joinable()) ticker.join();
      if (!ok) fail(ErrorCode::storage, fmt::format("cannot listen on port {}", port));
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
