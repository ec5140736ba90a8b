#include "tca/service/http.hpp"

#include <fmt/format.h>

#include "tca/core/error.hpp"
#include "tca/protocol/calendar.hpp"

namespace tca {

namespace {

using httplib::Request;
using httplib::Response;

void send(Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(Response& res, int status, std::string_view code, const std::string& message) {
  send(res, status, Json{{"error", code}, {"message", message}});
}

Json parse_body(const Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("request body: ") + e.what());
  }
}

std::optional<Timestamp> optional_at(const Json& j) {
  if (!j.contains("at") || j.at("at").is_null()) return std::nullopt;
  return decode<Timestamp>(j.at("at"), "at");
}

Json roster_row(const ParticipantState& s) {
  Json row{{"participant_id", s.profile.participant_id},
           {"nickname", s.profile.nickname},
           {"arm", s.profile.arm},
           {"level", s.gamification.level},
           {"level_name", s.gamification.level_name()},
           {"mileage", s.gamification.mileage.total()},
           {"open_safety_flags", s.open_safety_flags.size()},
           {"study_day", s.study_day}};
  if (const auto* day = s.day(s.date_of(s.last_at))) {
    row["today_items_done"] = day->ledger.done_count();
    row["today_regular_ema"] = day->regular_ema();
  } else {
    row["today_items_done"] = 0;
    row["today_regular_ema"] = 0;
  }
  return row;
}

Json prompt_json(const ScheduledPrompt& p) {
  Json j{{"kind", p.kind}, {"slot", p.slot}, {"due_at", p.due_at}};
  if (p.validity_until) j["valid_until"] = *p.validity_until;
  if (p.reminder_at) j["reminder_at"] = *p.reminder_at;
  return j;
}

Json timeline(const StudyService& service, const ParticipantId& id, int day) {
  auto state = service.state(id);
  auto date = state.enrollment_date() + days(day);
  require(day >= 0 && day < study_length_days(state.enrollment_date()), ErrorCode::range,
          fmt::format("day {} is outside the study window", day));
  Json schedule = Json::array();
  if (state.config) {
    for (const auto& p : build_daily_schedule(*state.config, state.enrollment_date(), day, state.timezone,
                                              service.settings().schedule)
                             .prompts) {
      schedule.push_back(prompt_json(p));
    }
  }
  Json events = Json::array();
  for (const auto& e : service.events(id)) {
    if (state.date_of(e.at) == date) events.push_back(event_to_json(e, state.timezone));
  }
  Json outbox = Json::array();
  for (const auto& row : service.outbox()) {
    if (row.participant_id == id && state.date_of(row.due_at) == date) outbox.push_back(row);
  }
  return Json{{"participant_id", id}, {"day", day}, {"date", date}, {"schedule", schedule}, {"events", events},
              {"outbox", outbox}};
}

Json tick_json(const TickReport& r) {
  return Json{{"now", r.now},
              {"materialized", r.materialized},
              {"dispatched", r.dispatched},
              {"failed", r.failed},
              {"expired_offers", r.expired_offers},
              {"settlements", r.settlements}};
}

}  // namespace

void install_routes(httplib::Server& server, StudyService& service, SimulatedClock* simulated) {
  auto tz = service.settings().timezone;
  auto token = service.settings().operator_token;

  // Every handler runs through this wrapper for auth, wire timezone and error mapping.
  auto wrap = [&service, tz, token](auto handler) {
    return [&service, tz, token, handler](const Request& req, Response& res) {
      if (token && req.get_header_value("X-Operator-Token") != *token) {
        send_error(res, 401, "unauthorized", "missing or wrong operator token");
        return;
      }
      ScopedWireTimezone wire(tz);
      try {
        handler(req, res);
      } catch (const Error& e) {
        send_error(res, http_status_for(e.code()), to_string(e.code()), e.what());
      } catch (const nlohmann::json::exception& e) {
        send_error(res, 400, "schema", e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
      }
    };
  };

  server.Get("/participants", wrap([&](const Request&, Response& res) {
               Json rows = Json::array();
               for (const auto& id : service.participants()) rows.push_back(roster_row(service.state(id)));
               send(res, 200, rows);
             }));

  server.Post("/participants", wrap([&](const Request& req, Response& res) {
                auto body = parse_body(req);
                auto profile = decode<ParticipantProfile>(body.at("profile"), "profile");
                std::optional<OnboardingConfig> config;
                if (body.contains("config") && !body.at("config").is_null()) {
                  config = decode<OnboardingConfig>(body.at("config"), "config");
                }
                auto state = service.enroll(profile, config, optional_at(body));
                send(res, 201, state_to_json(state));
              }));

  server.Get(R"(/participants/([^/]+)/state)", wrap([&](const Request& req, Response& res) {
               send(res, 200, state_to_json(service.state(req.matches[1])));
             }));

  server.Get(R"(/participants/([^/]+)/timeline)", wrap([&](const Request& req, Response& res) {
               require(req.has_param("day"), ErrorCode::validation, "query parameter day is required");
               int day = 0;
               try {
                 day = std::stoi(req.get_param_value("day"));
               } catch (const std::exception&) {
                 fail(ErrorCode::validation, "day must be an integer");
               }
               send(res, 200, timeline(service, req.matches[1], day));
             }));

  server.Post(R"(/participants/([^/]+)/ema)", wrap([&](const Request& req, Response& res) {
                auto body = parse_body(req);
                auto scores = decode<EmaScores>(body.at("scores"), "scores");
                auto offer = service.submit_ema(req.matches[1], scores, optional_at(body));
                send(res, 201, Json{{"offer_id", offer.offer_id}, {"ema_seq", offer.ema_seq}, {"options", offer.options}});
              }));

  server.Post(R"(/participants/([^/]+)/emi)", wrap([&](const Request& req, Response& res) {
                auto body = parse_body(req);
                EmiOutcome outcome;
                outcome.offer_id = body.at("offer_id").get<std::string>();
                outcome.decision = decode<EmiDecision>(body.at("decision"), "decision");
                if (body.contains("choice")) outcome.choice = decode<EmiOption>(body.at("choice"), "choice");
                if (body.contains("satisfaction")) outcome.satisfaction = body.at("satisfaction").get<int>();
                auto reply = service.record_emi(req.matches[1], outcome, optional_at(body));
                Json j{{"followup", reply.followup}, {"message_id", reply.message_id}};
                if (reply.content) j["content_ref"] = reply.content->content_ref;
                send(res, 201, j);
              }));

  server.Post(R"(/participants/([^/]+)/plan)", wrap([&](const Request& req, Response& res) {
                auto body = parse_body(req);
                service.record_plan(req.matches[1], decode<DailyPlan>(body.at("plan"), "plan"), optional_at(body));
                send(res, 201, Json{{"ok", true}});
              }));

  server.Post(R"(/participants/([^/]+)/diary)", wrap([&](const Request& req, Response& res) {
                auto body = parse_body(req);
                auto flags = service.record_diary(req.matches[1], decode<DailyDiary>(body.at("diary"), "diary"),
                                                  optional_at(body));
                Json ids = Json::array();
                for (const auto& f : flags) ids.push_back(f.flag_id);
                send(res, 201, Json{{"safety_flags", ids}});
              }));

  server.Post(R"(/participants/([^/]+)/assessments)", wrap([&](const Request& req, Response& res) {
                auto body = parse_body(req);
                AssessmentRecorded rec{decode<Instrument>(body.at("instrument"), "instrument"),
                                       decode<Wave>(body.at("wave"), "wave"),
                                       decode<std::vector<int>>(body.at("items"), "items")};
                send(res, 201, Json(service.record_assessment(req.matches[1], rec, optional_at(body))));
              }));

  server.Get("/outbox", wrap([&](const Request& req, Response& res) {
               std::optional<OutboxStatus> status;
               if (req.has_param("status")) status = parse_enum<OutboxStatus>(req.get_param_value("status"));
               send(res, 200, Json(service.outbox(status)));
             }));

  server.Post(R"(/outbox/(.+)/approve)", wrap([&](const Request& req, Response& res) {
                send(res, 200, Json(service.approve(req.matches[1])));
              }));

  server.Post(R"(/outbox/(.+)/hold)", wrap([&](const Request& req, Response& res) {
                send(res, 200, Json(service.hold(req.matches[1])));
              }));

  server.Put(R"(/outbox/(.+)/body)", wrap([&](const Request& req, Response& res) {
               send(res, 200, Json(service.edit_body(req.matches[1], parse_body(req))));
             }));

  server.Get(R"(/reports/([^/]+)/(\d{4}-\d{2}-\d{2}))", wrap([&](const Request& req, Response& res) {
               auto date = parse_date(req.matches[2].str());
               auto j = daily_report_json(service.daily_report(req.matches[1], date));
               for (const auto& row : service.outbox()) {
                 if (row.participant_id == req.matches[1] && row.report_for == date) {
                   j["outbox"] = {{"message_id", row.message_id}, {"status", row.status}, {"body", row.body}};
                 }
               }
               send(res, 200, j);
             }));

  server.Get("/safety/flags", wrap([&](const Request&, Response& res) {
               Json rows = Json::array();
               for (const auto& v : service.safety_flags()) {
                 Json row{{"participant_id", v.participant_id}, {"flag_id", v.flag.flag_id}, {"acked", v.acked}};
                 if (!v.acked) {
                   row["date"] = v.flag.date;
                   row["text"] = v.flag.text;
                   row["raised_at"] = v.flag.raised_at;
                 }
                 rows.push_back(row);
               }
               send(res, 200, rows);
             }));

  server.Post(R"(/safety/flags/([^/]+)/ack)", wrap([&](const Request& req, Response& res) {
                auto body = parse_body(req);
                bool changed = service.ack_safety_flag(req.matches[1], body.value("note", std::string()));
                send(res, 200, Json{{"flag_id", req.matches[1]}, {"acked", true}, {"changed", changed}});
              }));

  server.Get("/analytics/compliance/weekly", wrap([&](const Request&, Response& res) {
               auto rows = service.compliance();
               Json per = Json::array();
               for (const auto& r : rows) {
                 per.push_back({{"participant_id", r.participant_id},
                                {"week", r.week},
                                {"rEMA", r.rema_rate},
                                {"tEMA", r.tema_rate},
                                {"EMI", r.emi_rate},
                                {"routine", r.routine_rate}});
               }
               Json table = rows.empty() ? Json::array() : Json::parse(cohort_table_json(cohort_table(rows)));
               send(res, 200, Json{{"table", table}, {"participants", per}});
             }));

  server.Post("/tick", wrap([&](const Request& req, Response& res) {
                auto body = parse_body(req);
                send(res, 200, tick_json(service.tick(optional_at(body))));
              }));

  server.Post("/clock/advance", wrap([&service, simulated](const Request& req, Response& res) {
                require(simulated != nullptr, ErrorCode::state, "the study runs on the system clock");
                auto body = parse_body(req);
                if (body.contains("until")) simulated->set(decode<Timestamp>(body.at("until"), "until"));
                else simulated->advance(minutes(body.value("minutes", 0)));
                auto report = service.tick(simulated->now());
                send(res, 200, Json{{"now", simulated->now()}, {"tick", tick_json(report)}});
              }));

  server.Get("/health", [](const Request&, Response& res) { send(res, 200, Json{{"ok", true}}); });
}

}  // namespace tca
