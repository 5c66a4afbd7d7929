#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "lanebandit/data.hpp"

namespace httplib {
class Server;
}

namespace lanebandit::session {

enum class Mode { Feedback, Designate };

std::string_view to_string(Mode m) noexcept;
std::optional<Mode> parse_mode(std::string_view s) noexcept;

/// Display timing for the client; the service does not enforce it.
inline constexpr double kEpisodeSeconds = 16.0;
inline constexpr double kAnnounceSeconds = 3.0;
inline constexpr std::size_t kFlushEvery = 10;

struct Episode {
  Context context;
  std::optional<Action> proposed;  // feedback mode only
};

/// Status code, body and media type of one HTTP exchange.
struct Reply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct SessionDefaults {
  Mode mode = Mode::Feedback;
  std::uint64_t seed = 0;
  std::optional<std::size_t> episodes;  // feedback mode only; default is the grid twice
};

/// Runs one experiment session at a time for a human subject. All mutations
/// are serialized; concurrent readers share the lock.
class SessionService {
 public:
  SessionService(std::filesystem::path out_path, SessionDefaults defaults = {});

  Reply create(const std::string& body);        // POST /session
  Reply next() const;                           // GET /session/next
  Reply answer(const std::string& body);        // POST /session/answer
  Reply export_csv() const;                     // GET /session/export

  /// Writes the collected rows to the output path (atomic replace).
  void flush() const;
  /// Registers the four routes on `server`.
  void mount(httplib::Server& server);

  const std::filesystem::path& out_path() const noexcept { return out_path_; }

 private:
  struct State {
    std::string id;
    Mode mode = Mode::Feedback;
    std::vector<Episode> schedule;
    std::size_t cursor = 0;
    std::vector<Observation> feedback_rows;
    std::vector<LabeledExample> designated_rows;

    bool complete() const noexcept { return cursor == schedule.size(); }
  };

  std::string export_body_locked() const;
  void flush_locked() const;

  std::filesystem::path out_path_;
  SessionDefaults defaults_;
  mutable std::shared_mutex mutex_;
  std::optional<State> state_;
  std::size_t sessions_started_ = 0;
};

}  // namespace lanebandit::session
