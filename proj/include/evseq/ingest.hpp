#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "evseq/time.hpp"

namespace evseq {

struct EventRecord {
  std::string identifier;
  std::string event_type;
  Timestamp start;
  std::optional<Timestamp> end;  // absent for point events

  bool is_point() const { return !end.has_value(); }
  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

// Seconds between start and end; 0 for point events.
double duration_of(const EventRecord& record);

struct TimeExtent {
  Timestamp first;
  Timestamp last;
  friend bool operator==(const TimeExtent&, const TimeExtent&) = default;
};

enum class IngestErrorKind { MalformedRow, NegativeDuration, EmptyLog };

const char* to_string(IngestErrorKind kind);

class IngestError : public std::runtime_error {
 public:
  IngestError(IngestErrorKind kind, std::size_t line, const std::string& reason);

  IngestErrorKind kind() const { return kind_; }
  // 1-based physical line in the source; 0 when not tied to a line.
  std::size_t line() const { return line_; }

 private:
  IngestErrorKind kind_;
  std::size_t line_;
};

// Immutable, validated collection of records in file order.
class EventLog {
 public:
  // Throws IngestError on invariant violations (empty fields, end < start,
  // no records).
  explicit EventLog(std::vector<EventRecord> records);

  const std::vector<EventRecord>& records() const { return records_; }
  const std::set<std::string>& type_catalog() const { return type_catalog_; }
  const TimeExtent& time_extent() const { return extent_; }
  std::size_t size() const { return records_.size(); }

  friend bool operator==(const EventLog& a, const EventLog& b) { return a.records_ == b.records_; }

 private:
  std::vector<EventRecord> records_;
  std::set<std::string> type_catalog_;
  TimeExtent extent_;
};

enum class IngestFormat { Csv };

EventLog parse_event_log(std::istream& source, IngestFormat format = IngestFormat::Csv);
EventLog parse_event_log_string(const std::string& text);
EventLog load_event_log(const std::string& path);

// Writes the canonical `id,event_type,start,end` form.
void write_event_log_csv(const EventLog& log, std::ostream& out);
std::string event_log_to_csv(const EventLog& log);

}  // namespace evseq
