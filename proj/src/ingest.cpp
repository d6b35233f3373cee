#include "evseq/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace evseq {

namespace {

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// RFC 4180 style splitter: quoted fields may contain commas, doubled quotes
// and newlines. Blank lines are skipped.
std::vector<CsvRow> split_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    CsvRow row;
    row.line = line;
    std::string field;
    bool row_done = false;
    while (!row_done) {
      field.clear();
      if (i < text.size() && text[i] == '"') {
        ++i;
        while (i < text.size()) {
          char c = text[i];
          if (c == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field.push_back('"');
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (c == '\n') ++line;
          field.push_back(c);
          ++i;
        }
      }
      while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
        field.push_back(text[i]);
        ++i;
      }
      row.fields.push_back(field);
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < text.size() && text[i] == '\r') ++i;
      if (i < text.size() && text[i] == '\n') ++i;
      ++line;
      row_done = true;
    }
    bool blank = row.fields.size() == 1 && row.fields[0].empty();
    if (!blank) rows.push_back(std::move(row));
  }
  return rows;
}

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\r\n") != std::string::npos;
}

std::string quote(const std::string& s) {
  if (!needs_quotes(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

struct Columns {
  std::size_t id = 0;
  std::size_t type = 0;
  std::size_t start = 0;
  std::size_t end_or_duration = 0;
  bool duration_form = false;
  std::size_t count = 0;
};

Columns resolve_header(const CsvRow& header) {
  Columns cols;
  cols.count = header.fields.size();
  std::optional<std::size_t> id, type, start, end, duration;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    std::string name = trim(header.fields[i]);
    std::optional<std::size_t>* slot = nullptr;
    if (name == "id") slot = &id;
    else if (name == "event_type") slot = &type;
    else if (name == "start") slot = &start;
    else if (name == "end") slot = &end;
    else if (name == "duration_seconds") slot = &duration;
    else throw IngestError(IngestErrorKind::MalformedRow, header.line, "unknown column '" + name + "'");
    if (slot->has_value()) {
      throw IngestError(IngestErrorKind::MalformedRow, header.line, "duplicate column '" + name + "'");
    }
    *slot = i;
  }
  if (!id || !type || !start) {
    throw IngestError(IngestErrorKind::MalformedRow, header.line,
                      "header must name columns id, event_type, start");
  }
  if (end.has_value() == duration.has_value()) {
    throw IngestError(IngestErrorKind::MalformedRow, header.line,
                      "header must name exactly one of end, duration_seconds");
  }
  cols.id = *id;
  cols.type = *type;
  cols.start = *start;
  cols.duration_form = duration.has_value();
  cols.end_or_duration = cols.duration_form ? *duration : *end;
  return cols;
}

EventRecord parse_row(const CsvRow& row, const Columns& cols) {
  auto fail = [&](const std::string& reason) {
    return IngestError(IngestErrorKind::MalformedRow, row.line, reason);
  };
  if (row.fields.size() != cols.count) {
    throw fail("expected " + std::to_string(cols.count) + " fields, found " +
               std::to_string(row.fields.size()));
  }
  EventRecord rec;
  rec.identifier = row.fields[cols.id];
  rec.event_type = row.fields[cols.type];
  if (rec.identifier.empty()) throw fail("empty id");
  if (rec.event_type.empty()) throw fail("empty event_type");

  std::string start_text = trim(row.fields[cols.start]);
  if (start_text.empty()) throw fail("empty start");
  auto start = parse_timestamp(start_text);
  if (!start) throw fail("unparseable start timestamp '" + start_text + "'");
  rec.start = *start;

  std::string tail = trim(row.fields[cols.end_or_duration]);
  if (tail.empty()) return rec;

  if (cols.duration_form) {
    double seconds = 0.0;
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), seconds);
    if (ec != std::errc{} || ptr != tail.data() + tail.size() || !std::isfinite(seconds)) {
      throw fail("unparseable duration_seconds '" + tail + "'");
    }
    if (seconds < 0) throw IngestError(IngestErrorKind::NegativeDuration, row.line, "negative duration");
    rec.end = rec.start + std::chrono::milliseconds{std::llround(seconds * 1000.0)};
  } else {
    auto end = parse_timestamp(tail);
    if (!end) throw fail("unparseable end timestamp '" + tail + "'");
    if (*end < rec.start) throw IngestError(IngestErrorKind::NegativeDuration, row.line, "end before start");
    rec.end = *end;
  }
  return rec;
}

}  // namespace

const char* to_string(IngestErrorKind kind) {
  switch (kind) {
    case IngestErrorKind::MalformedRow: return "MalformedRow";
    case IngestErrorKind::NegativeDuration: return "NegativeDuration";
    case IngestErrorKind::EmptyLog: return "EmptyLog";
  }
  return "IngestError";
}

IngestError::IngestError(IngestErrorKind kind, std::size_t line, const std::string& reason)
    : std::runtime_error(line > 0 ? std::string(to_string(kind)) + " at line " +
                                        std::to_string(line) + ": " + reason
                                  : std::string(to_string(kind)) + ": " + reason),
      kind_(kind),
      line_(line) {}

double duration_of(const EventRecord& record) {
  if (!record.end) return 0.0;
  return seconds_between(record.start, *record.end);
}

EventLog::EventLog(std::vector<EventRecord> records) : records_(std::move(records)) {
  if (records_.empty()) throw IngestError(IngestErrorKind::EmptyLog, 0, "no data rows");
  extent_ = {records_.front().start, records_.front().start};
  for (const auto& r : records_) {
    if (r.identifier.empty() || r.event_type.empty()) {
      throw IngestError(IngestErrorKind::MalformedRow, 0, "empty identifier or event type");
    }
    if (r.end && *r.end < r.start) {
      throw IngestError(IngestErrorKind::NegativeDuration, 0, "end before start");
    }
    type_catalog_.insert(r.event_type);
    extent_.first = std::min(extent_.first, r.start);
    extent_.last = std::max(extent_.last, r.end.value_or(r.start));
  }
}

EventLog parse_event_log(std::istream& source, IngestFormat format) {
  (void)format;  // CSV is the only format
  std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  auto rows = split_csv(text);
  if (rows.empty()) throw IngestError(IngestErrorKind::EmptyLog, 0, "missing header row");
  Columns cols = resolve_header(rows.front());

  std::vector<EventRecord> records;
  records.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) records.push_back(parse_row(rows[i], cols));
  if (records.empty()) throw IngestError(IngestErrorKind::EmptyLog, 0, "no data rows");
  return EventLog(std::move(records));
}

EventLog parse_event_log_string(const std::string& text) {
  std::istringstream in(text);
  return parse_event_log(in);
}

EventLog load_event_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_event_log(in);
}

void write_event_log_csv(const EventLog& log, std::ostream& out) {
  out << "id,event_type,start,end\n";
  for (const auto& r : log.records()) {
    out << quote(r.identifier) << ',' << quote(r.event_type) << ',' << format_timestamp(r.start)
        << ',';
    if (r.end) out << format_timestamp(*r.end);
    out << '\n';
  }
}

std::string event_log_to_csv(const EventLog& log) {
  std::ostringstream out;
  write_event_log_csv(log, out);
  return out.str();
}

}  // namespace evseq
