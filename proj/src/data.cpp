#include "lanebandit/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lanebandit/errors.hpp"
#include "lanebandit/text.hpp"

namespace lanebandit {

void validate_reward(int reward) {
  if (reward != -1 && reward != 1) {
    throw InvalidRewardError("reward must be -1 or +1, got " + std::to_string(reward));
  }
}

Action reconstruct_true_action(Action pulled, int reward) {
  validate_reward(reward);
  return reward > 0 ? pulled : opposite(pulled);
}

std::vector<LabeledExample> to_labeled(const std::vector<Observation>& data) {
  std::vector<LabeledExample> out;
  out.reserve(data.size());
  for (const auto& o : data) out.push_back({o.context, reconstruct_true_action(o.action, o.reward)});
  return out;
}

namespace {

void append_context(std::string& out, const Context& c) {
  out += text::format_double(c.gap_front);
  out += ',';
  out += text::format_double(c.gap_rear_adj);
  out += ',';
  out += text::format_double(c.rear_vel);
}

// Calls `row(fields, line_no)` for each data row after checking the header.
template <typename RowFn>
void for_each_row(const std::string& csv, std::string_view header, std::size_t arity, RowFn row) {
  auto lines = text::split(csv, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || text::trim(lines[0]) != header) {
    throw ParseError(1, "expected header '" + std::string(header) + "'");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (text::trim(lines[i]).empty()) continue;
    const auto fields = text::split(text::trim(lines[i]), ',');
    if (fields.size() != arity) {
      throw ParseError(line_no, "expected " + std::to_string(arity) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    row(fields, line_no);
  }
}

Context parse_context(const std::vector<std::string_view>& f, std::size_t line_no) {
  double v[3];
  const char* names[] = {"x1_m", "x2_m", "x3_kph"};
  for (int i = 0; i < 3; ++i) {
    const auto d = text::parse_double(f[i]);
    if (!d || !std::isfinite(*d) || *d <= 0.0) {
      throw ParseError(line_no, std::string(names[i]) + " must be a positive number, got '" +
                                    std::string(f[i]) + "'");
    }
    v[i] = *d;
  }
  return {v[0], v[1], v[2]};
}

Action parse_action(std::string_view s, std::size_t line_no, const char* name) {
  const auto v = text::parse_int(s);
  if (!v || (*v != 0 && *v != 1)) {
    throw ParseError(line_no, std::string(name) + " must be 0 or 1, got '" + std::string(s) + "'");
  }
  return *v == 0 ? Action::LaneChange : Action::LaneKeep;
}

}  // namespace

std::string format_observations(const std::vector<Observation>& rows) {
  std::string out(kObservationHeader);
  out += '\n';
  for (const auto& o : rows) {
    append_context(out, o.context);
    out += ',';
    out += std::to_string(encode(o.action));
    out += ',';
    out += std::to_string(o.reward);
    out += '\n';
  }
  return out;
}

std::string format_labeled(const std::vector<LabeledExample>& rows) {
  std::string out(kLabeledHeader);
  out += '\n';
  for (const auto& e : rows) {
    append_context(out, e.context);
    out += ',';
    out += std::to_string(encode(e.true_action));
    out += '\n';
  }
  return out;
}

std::vector<Observation> parse_observations(const std::string& csv) {
  std::vector<Observation> rows;
  for_each_row(csv, kObservationHeader, 5, [&](const auto& f, std::size_t line_no) {
    Observation o;
    o.context = parse_context(f, line_no);
    o.action = parse_action(f[3], line_no, "action");
    const auto r = text::parse_int(f[4]);
    if (!r || (*r != -1 && *r != 1)) {
      throw ParseError(line_no, "reward must be -1 or 1, got '" + std::string(f[4]) + "'");
    }
    o.reward = static_cast<int>(*r);
    rows.push_back(o);
  });
  return rows;
}

std::vector<LabeledExample> parse_labeled(const std::string& csv) {
  std::vector<LabeledExample> rows;
  for_each_row(csv, kLabeledHeader, 4, [&](const auto& f, std::size_t line_no) {
    rows.push_back({parse_context(f, line_no), parse_action(f[3], line_no, "true_action")});
  });
  return rows;
}

std::vector<Observation> read_observations(const std::filesystem::path& path) {
  return parse_observations(text::read_file(path));
}

void write_observations(const std::vector<Observation>& rows, const std::filesystem::path& path) {
  text::write_file_atomic(path, format_observations(rows));
}

std::vector<LabeledExample> read_labeled(const std::filesystem::path& path) {
  return parse_labeled(text::read_file(path));
}

void write_labeled(const std::vector<LabeledExample>& rows, const std::filesystem::path& path) {
  text::write_file_atomic(path, format_labeled(rows));
}

ScreenDecision screen(double ratio, double cutoff) noexcept {
  return ratio >= cutoff ? ScreenDecision::Accept : ScreenDecision::Reject;
}

ConsistencyReport consistency_ratio(const std::vector<Observation>& data, double cutoff,
                                    double tolerance) {
  if (data.empty()) throw DataError("consistency ratio needs at least one trial");

  auto key = [&](std::size_t i) {
    const auto& c = data[i].context;
    return std::array<double, 3>{c.gap_front, c.gap_rear_adj, c.rear_vel};
  };
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

  auto same_context = [&](std::size_t a, std::size_t b) {
    const auto ka = key(a), kb = key(b);
    for (int i = 0; i < 3; ++i)
      if (std::abs(ka[i] - kb[i]) > tolerance) return false;
    return true;
  };

  ConsistencyReport rep;
  rep.total_trials = data.size();
  std::size_t begin = 0;
  while (begin < order.size()) {
    std::size_t end = begin + 1;
    while (end < order.size() && same_context(order[begin], order[end])) ++end;

    // Within a group only the implied preference matters: count each side.
    std::size_t prefer_change = 0;
    for (std::size_t k = begin; k < end; ++k) {
      const auto& o = data[order[k]];
      if (reconstruct_true_action(o.action, o.reward) == Action::LaneChange) ++prefer_change;
    }
    const std::size_t size = end - begin;
    const std::size_t prefer_keep = size - prefer_change;
    if (size > 1) rep.paired_trials += size;
    rep.inconsistent_pairs += prefer_change * prefer_keep;
    if (prefer_change == 0 || prefer_keep == 0) rep.consistent_trials += size;
    begin = end;
  }
  rep.ratio = static_cast<double>(rep.consistent_trials) / static_cast<double>(rep.total_trials);
  rep.decision = screen(rep.ratio, cutoff);
  return rep;
}

std::string_view to_string(ScreenDecision d) noexcept {
  return d == ScreenDecision::Accept ? "Accept" : "Reject";
}

std::ostream& operator<<(std::ostream& os, const ConsistencyReport& r) {
  return os << "consistency_ratio=" << text::format_fixed(r.ratio, 4)
            << " trials=" << r.total_trials << " consistent=" << r.consistent_trials
            << " paired=" << r.paired_trials << " inconsistent_pairs=" << r.inconsistent_pairs
            << " decision=" << to_string(r.decision);
}

}  // namespace lanebandit
