#include "cabfare/query_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "cabfare/csv.hpp"
#include "cabfare/error.hpp"

namespace cabfare {

using nlohmann::json;

namespace {

json point_json(GeoPoint const& p) { return {{"lat", p.lat}, {"lng", p.lng}}; }

GeoPoint point_from(json const& j) {
  return {j.at("lat").get<double>(), j.at("lng").get<double>()};
}

/// Writes `line` (newline appended) with one write(2) on an O_APPEND fd.
void append_line(std::filesystem::path const& path, std::string line) {
  line += '\n';
  auto const fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw StorageFailure("cannot open '" + path.string() + "': " + std::strerror(errno));
  }
  std::size_t written = 0;
  while (written < line.size()) {
    auto const n = ::write(fd, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) {
        continue;
      }
      auto const err = errno;
      ::close(fd);
      throw StorageFailure("write to '" + path.string() + "' failed: " +
                           std::strerror(err));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) {
    throw StorageFailure("flush of '" + path.string() + "' failed");
  }
}

/// Complete lines of an NDJSON file; a final unterminated line is dropped.
std::vector<std::string> read_lines(std::filesystem::path const& path) {
  std::vector<std::string> lines;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    return lines;
  }
  std::ifstream in{path, std::ios::binary};
  if (!in) {
    throw StorageFailure("cannot read '" + path.string() + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  auto const content = buf.str();
  std::size_t start = 0;
  while (true) {
    auto const nl = content.find('\n', start);
    if (nl == std::string::npos) {
      break;
    }
    if (nl > start) {
      lines.push_back(content.substr(start, nl - start));
    }
    start = nl + 1;
  }
  return lines;
}

void ensure_parent(std::filesystem::path const& path) {
  auto const parent = path.parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) {
      throw StorageFailure("cannot create '" + parent.string() + "': " + ec.message());
    }
  }
}

}  // namespace

QueryRecord QueryRecord::from(JourneyQuery const& q, ComparisonResult const& r) {
  return {r.query_id,  q.user_id, q.city,     q.origin,   q.destination,
          q.submitted_at.text, r.estimates, r.winner, r.savings};
}

json to_json(QueryRecord const& r) {
  json estimates = json::array();
  for (auto const& e : r.estimates) {
    estimates.push_back(to_json(e));
  }
  return {{"id", r.id},
          {"user_id", r.user_id},
          {"city", r.city},
          {"origin", point_json(r.origin)},
          {"destination", point_json(r.destination)},
          {"submitted_at", r.submitted_at},
          {"estimates", std::move(estimates)},
          {"winner", r.winner},
          {"savings_minor", r.savings.minor()},
          {"currency", r.savings.currency()}};
}

QueryRecord query_record_from_json(json const& j) {
  QueryRecord r;
  r.id = j.at("id").get<std::string>();
  r.user_id = j.value("user_id", "");
  r.city = j.at("city").get<std::string>();
  r.origin = point_from(j.at("origin"));
  r.destination = point_from(j.at("destination"));
  r.submitted_at = j.at("submitted_at").get<std::string>();
  for (auto const& e : j.at("estimates")) {
    r.estimates.push_back(price_estimate_from_json(e));
  }
  r.winner = j.at("winner").get<std::string>();
  r.savings = {j.at("savings_minor").get<std::int64_t>(),
               j.at("currency").get<std::string>()};
  return r;
}

// ---------------------------------------------------------------------------

QueryLog::QueryLog(std::filesystem::path path) : path_(std::move(path)) {
  ensure_parent(*path_);
  records_ = read_file(*path_);
}

std::vector<QueryRecord> QueryLog::read_file(std::filesystem::path const& path) {
  std::vector<QueryRecord> out;
  std::size_t n = 0;
  for (auto const& line : read_lines(path)) {
    ++n;
    try {
      out.push_back(query_record_from_json(json::parse(line)));
    } catch (json::exception const& e) {
      throw StorageFailure("corrupt record " + std::to_string(n) + " in '" +
                           path.string() + "': " + e.what());
    }
  }
  return out;
}

void QueryLog::append(QueryRecord const& record) {
  std::lock_guard lock{mutex_};
  if (path_) {
    append_line(*path_, to_json(record).dump());
  }
  records_.push_back(record);
}

std::vector<QueryRecord> QueryLog::records() const {
  std::lock_guard lock{mutex_};
  return records_;
}

std::optional<QueryRecord> QueryLog::find(std::string const& id) const {
  std::lock_guard lock{mutex_};
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    if (it->id == id) {
      return *it;
    }
  }
  return std::nullopt;
}

std::size_t QueryLog::size() const {
  std::lock_guard lock{mutex_};
  return records_.size();
}

SavingsSummary savings_summary(std::vector<QueryRecord> const& records,
                               std::string const& city, std::string const& currency,
                               std::optional<Timestamp> const& from,
                               std::optional<Timestamp> const& to) {
  constexpr auto inf = std::numeric_limits<double>::infinity();
  auto const lo = from ? from->epoch_seconds() : -inf;
  auto const hi = to ? to->epoch_seconds() : inf;
  SavingsSummary s{0, Money::zero(currency), Money::zero(currency)};
  for (auto const& r : records) {
    if (r.city != city || r.estimates.size() < 2) {
      continue;
    }
    if (from || to) {
      auto const t = parse_rfc3339(r.submitted_at).epoch_seconds();
      if (t < lo || t >= hi) {
        continue;
      }
    }
    s.total_savings += r.savings;
    ++s.query_count;
  }
  if (s.query_count > 0) {
    s.mean_savings = {div_round_half_away(s.total_savings.minor(),
                                          static_cast<std::int64_t>(s.query_count)),
                      currency};
  }
  return s;
}

// ---------------------------------------------------------------------------

json to_json(FeedbackRecord const& r) {
  json j{{"id", r.id},
         {"user_id", r.user_id},
         {"text", r.text},
         {"submitted_at", r.submitted_at}};
  if (r.query_id) {
    j["query_id"] = *r.query_id;
  }
  if (r.provider) {
    j["provider"] = *r.provider;
  }
  auto const money = [&](char const* key, std::optional<Money> const& m) {
    if (m) {
      j[std::string{key} + "_minor"] = m->minor();
      j[key] = m->to_string();
      j["currency"] = m->currency();
    }
  };
  money("actual_fare", r.actual_fare);
  money("estimate", r.estimate);
  money("deviation", r.deviation);
  return j;
}

FeedbackRecord feedback_record_from_json(json const& j) {
  FeedbackRecord r;
  r.id = j.at("id").get<std::string>();
  r.user_id = j.value("user_id", "");
  r.text = j.at("text").get<std::string>();
  r.submitted_at = j.value("submitted_at", "");
  if (j.contains("query_id")) {
    r.query_id = j["query_id"].get<std::string>();
  }
  if (j.contains("provider")) {
    r.provider = j["provider"].get<std::string>();
  }
  auto const currency = j.value("currency", "");
  auto const money = [&](char const* key) -> std::optional<Money> {
    auto const k = std::string{key} + "_minor";
    if (!j.contains(k)) {
      return std::nullopt;
    }
    return Money{j[k].get<std::int64_t>(), currency};
  };
  r.actual_fare = money("actual_fare");
  r.estimate = money("estimate");
  r.deviation = money("deviation");
  return r;
}

FeedbackLog::FeedbackLog(std::filesystem::path path) : path_(std::move(path)) {
  ensure_parent(*path_);
  std::size_t n = 0;
  for (auto const& line : read_lines(*path_)) {
    ++n;
    try {
      records_.push_back(feedback_record_from_json(json::parse(line)));
    } catch (json::exception const& e) {
      throw StorageFailure("corrupt feedback record " + std::to_string(n) + ": " +
                           e.what());
    }
  }
}

FeedbackRecord FeedbackLog::append(FeedbackRecord record) {
  std::lock_guard lock{mutex_};
  char id[32];
  std::snprintf(id, sizeof id, "fb-%06zu", records_.size() + 1);
  record.id = id;
  if (path_) {
    append_line(*path_, to_json(record).dump());
  }
  records_.push_back(record);
  return record;
}

std::vector<FeedbackRecord> FeedbackLog::records() const {
  std::lock_guard lock{mutex_};
  return records_;
}

FeedbackRecord record_feedback(FeedbackLog& feedback, QueryLog const& queries,
                               FeedbackInput const& input, Timestamp const& now) {
  if (trim_copy(input.text).empty()) {
    throw InvalidInput("feedback text must not be empty");
  }
  FeedbackRecord r;
  r.user_id = input.user_id;
  r.text = input.text;
  r.submitted_at = now.text;
  r.query_id = input.query_id;
  r.actual_fare = input.actual_fare;
  if (input.query_id) {
    auto const q = queries.find(*input.query_id);
    if (!q) {
      throw InvalidInput("unknown query_id '" + *input.query_id + "'");
    }
    auto const provider = input.provider.value_or(q->winner);
    auto const it = std::find_if(begin(q->estimates), end(q->estimates),
                                 [&](auto const& e) { return e.provider == provider; });
    if (it == q->estimates.end()) {
      throw InvalidInput("query '" + *input.query_id + "' has no estimate for '" +
                         provider + "'");
    }
    r.provider = provider;
    r.estimate = it->amount;
    if (input.actual_fare) {
      if (input.actual_fare->currency() != it->amount.currency()) {
        throw InvalidInput("actual fare currency differs from the estimate");
      }
      r.deviation = *input.actual_fare - it->amount;
    }
  }
  return feedback.append(std::move(r));
}

}  // namespace cabfare
