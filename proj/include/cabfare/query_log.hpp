#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cabfare/comparison.hpp"
#include "cabfare/money.hpp"

namespace cabfare {

/// One persisted comparison, the unit of the query log.
struct QueryRecord {
  std::string id;
  std::string user_id;
  std::string city;
  GeoPoint origin;
  GeoPoint destination;
  std::string submitted_at;
  std::vector<PriceEstimate> estimates;
  std::string winner;
  Money savings;

  static QueryRecord from(JourneyQuery const& q, ComparisonResult const& r);
};

nlohmann::json to_json(QueryRecord const& r);
QueryRecord query_record_from_json(nlohmann::json const& j);

/// Append-only newline-delimited JSON file. Appends are serialized behind a
/// mutex and written with a single write(2) on an O_APPEND descriptor, so
/// readers see whole records only. Without a path the log is memory-only.
/// Construction replays any existing file; a trailing partial line (torn
/// by a crash) is ignored.
class QueryLog {
 public:
  QueryLog() = default;
  explicit QueryLog(std::filesystem::path path);

  QueryLog(QueryLog const&) = delete;
  QueryLog& operator=(QueryLog const&) = delete;

  /// Throws StorageFailure.
  void append(QueryRecord const& record);

  /// Snapshot of every record appended or replayed so far.
  std::vector<QueryRecord> records() const;
  std::optional<QueryRecord> find(std::string const& id) const;
  std::size_t size() const;

  std::optional<std::filesystem::path> const& path() const noexcept { return path_; }

  /// Parses a log file from scratch. Throws StorageFailure on unreadable
  /// or corrupt (non-trailing) lines.
  static std::vector<QueryRecord> read_file(std::filesystem::path const& path);

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::vector<QueryRecord> records_;
};

struct SavingsSummary {
  std::size_t query_count = 0;
  Money mean_savings;
  Money total_savings;
};

/// Mean and total savings of the city's records with from <= submitted_at <
/// to (instants; either bound optional). Mean rounds half away from zero.
SavingsSummary savings_summary(std::vector<QueryRecord> const& records,
                               std::string const& city, std::string const& currency,
                               std::optional<Timestamp> const& from = std::nullopt,
                               std::optional<Timestamp> const& to = std::nullopt);

struct FeedbackInput {
  std::string user_id;
  std::string text;
  std::optional<std::string> query_id;
  std::optional<std::string> provider;  // defaults to the query's winner
  std::optional<Money> actual_fare;
};

struct FeedbackRecord {
  std::string id;
  std::string user_id;
  std::string text;
  std::string submitted_at;
  std::optional<std::string> query_id;
  std::optional<std::string> provider;
  std::optional<Money> actual_fare;
  std::optional<Money> estimate;
  std::optional<Money> deviation;  // actual - estimate
};

nlohmann::json to_json(FeedbackRecord const& r);
FeedbackRecord feedback_record_from_json(nlohmann::json const& j);

/// Append-only feedback store with the same on-disk discipline as QueryLog.
class FeedbackLog {
 public:
  FeedbackLog() = default;
  explicit FeedbackLog(std::filesystem::path path);

  FeedbackLog(FeedbackLog const&) = delete;
  FeedbackLog& operator=(FeedbackLog const&) = delete;

  /// Assigns the next sequential id ("fb-000001", ...) and appends.
  FeedbackRecord append(FeedbackRecord record);
  std::vector<FeedbackRecord> records() const;

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::vector<FeedbackRecord> records_;
};

/// Validates and stores feedback. When `actual_fare` and `query_id` are
/// present the matching estimate is looked up and the deviation stored.
/// Throws InvalidInput (empty text, unknown query or provider) or
/// StorageFailure.
FeedbackRecord record_feedback(FeedbackLog& feedback, QueryLog const& queries,
                               FeedbackInput const& input, Timestamp const& now);

}  // namespace cabfare
