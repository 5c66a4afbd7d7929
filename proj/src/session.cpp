#include "lanebandit/session.hpp"

#include <httplib.h>

#include <json.hpp>
#include <mutex>

#include "lanebandit/random.hpp"
#include "lanebandit/text.hpp"
#include "lanebandit/usersim.hpp"

namespace lanebandit::session {

using nlohmann::json;

namespace {

Reply error(int status, std::string_view message) {
  return {status, json{{"error", message}}.dump(), "application/json"};
}

Reply ok(const json& body) { return {200, body.dump(), "application/json"}; }

std::optional<json> parse_body(const std::string& body) {
  if (text::trim(body).empty()) return json::object();
  auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

}  // namespace

std::string_view to_string(Mode m) noexcept {
  return m == Mode::Feedback ? "feedback" : "designate";
}

std::optional<Mode> parse_mode(std::string_view s) noexcept {
  if (s == "feedback") return Mode::Feedback;
  if (s == "designate") return Mode::Designate;
  return std::nullopt;
}

SessionService::SessionService(std::filesystem::path out_path, SessionDefaults defaults)
    : out_path_(std::move(out_path)), defaults_(defaults) {}

Reply SessionService::create(const std::string& body) {
  const auto req = parse_body(body);
  if (!req) return error(400, "request body must be a JSON object");

  Mode mode = defaults_.mode;
  if (req->contains("mode")) {
    const auto& m = (*req)["mode"];
    const auto parsed = m.is_string() ? parse_mode(m.get<std::string>()) : std::nullopt;
    if (!parsed) return error(400, "mode must be 'feedback' or 'designate'");
    mode = *parsed;
  }
  std::uint64_t seed = defaults_.seed;
  if (req->contains("seed")) {
    const auto& s = (*req)["seed"];
    if (!s.is_number_unsigned()) return error(400, "seed must be a non-negative integer");
    seed = s.get<std::uint64_t>();
  }
  std::size_t count = defaults_.episodes.value_or(kDefaultSession1Episodes);
  if (req->contains("episodes")) {
    const auto& e = (*req)["episodes"];
    if (!e.is_number_unsigned() || e.get<std::size_t>() == 0)
      return error(400, "episodes must be a positive integer");
    if (mode == Mode::Designate) return error(400, "episodes applies to feedback mode only");
    count = e.get<std::size_t>();
  }

  std::unique_lock lock(mutex_);
  if (state_ && !state_->complete()) return error(409, "a session is already active");

  State st;
  st.mode = mode;
  st.id = "session-" + std::to_string(++sessions_started_);
  if (mode == Mode::Feedback) {
    Rng gen(seed);
    for (const auto& [context, arm] : feedback_schedule(count, gen))
      st.schedule.push_back({context, arm});
  } else {
    for (const auto& c : enumerate_grid()) st.schedule.push_back({c, std::nullopt});
  }
  state_ = std::move(st);
  return ok({{"session_id", state_->id}, {"total", state_->schedule.size()}});
}

Reply SessionService::next() const {
  std::shared_lock lock(mutex_);
  if (!state_) return error(404, "no session");
  if (state_->complete()) return error(410, "schedule exhausted");
  const auto& ep = state_->schedule[state_->cursor];
  json body{
      {"session_id", state_->id},
      {"mode", to_string(state_->mode)},
      {"episode_id", state_->cursor},
      {"total", state_->schedule.size()},
      {"context",
       {{"x1_m", ep.context.gap_front},
        {"x2_m", ep.context.gap_rear_adj},
        {"x3_kph", ep.context.rear_vel}}},
      {"display_timing", {{"episode_s", kEpisodeSeconds}, {"announce_s", kAnnounceSeconds}}},
  };
  if (ep.proposed) body["proposed_action"] = encode(*ep.proposed);
  return ok(body);
}

Reply SessionService::answer(const std::string& body) {
  const auto req = parse_body(body);
  if (!req) return error(400, "request body must be a JSON object");

  std::unique_lock lock(mutex_);
  if (!state_) return error(404, "no session");

  if (!req->contains("episode_id") || !req->at("episode_id").is_number_unsigned())
    return error(400, "episode_id must be a non-negative integer");
  const auto& id = req->at("episode_id");

  const bool has_reward = req->contains("reward");
  const bool has_designation = req->contains("designated_action");
  int value = 0;
  if (state_->mode == Mode::Feedback) {
    if (!has_reward || has_designation) return error(400, "feedback sessions take 'reward' only");
    const auto& r = (*req)["reward"];
    if (!r.is_number_integer() || (r.get<int>() != 1 && r.get<int>() != -1))
      return error(400, "reward must be -1 or 1");
    value = r.get<int>();
  } else {
    if (!has_designation || has_reward)
      return error(400, "designate sessions take 'designated_action' only");
    const auto& a = (*req)["designated_action"];
    if (!a.is_number_integer() || (a.get<int>() != 0 && a.get<int>() != 1))
      return error(400, "designated_action must be 0 or 1");
    value = a.get<int>();
  }

  if (id.get<std::size_t>() != state_->cursor) {
    return error(409, "episode " + std::to_string(id.get<std::size_t>()) +
                          " is not the current episode (" + std::to_string(state_->cursor) + ")");
  }

  const auto& ep = state_->schedule[state_->cursor];
  if (state_->mode == Mode::Feedback) {
    state_->feedback_rows.push_back({ep.context, *ep.proposed, value});
  } else {
    state_->designated_rows.push_back({ep.context, decode_action(value)});
  }
  ++state_->cursor;
  if (state_->complete() || state_->cursor % kFlushEvery == 0) flush_locked();

  return ok({{"accepted", true}, {"remaining", state_->schedule.size() - state_->cursor}});
}

std::string SessionService::export_body_locked() const {
  return state_->mode == Mode::Feedback ? format_observations(state_->feedback_rows)
                                        : format_labeled(state_->designated_rows);
}

Reply SessionService::export_csv() const {
  std::shared_lock lock(mutex_);
  if (!state_) return error(404, "no session");
  return {200, export_body_locked(), "text/csv"};
}

void SessionService::flush_locked() const {
  if (state_ && !out_path_.empty()) text::write_file_atomic(out_path_, export_body_locked());
}

void SessionService::flush() const {
  std::unique_lock lock(mutex_);
  flush_locked();
}

void SessionService::mount(httplib::Server& server) {
  auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type.c_str());
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(/session.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  server.Post("/session", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, create(req.body));
  });
  server.Get("/session/next", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, next());
  });
  server.Post("/session/answer", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, answer(req.body));
  });
  server.Get("/session/export", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, export_csv());
  });
}

}  // namespace lanebandit::session
