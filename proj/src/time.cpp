#include "evseq/time.hpp"

#include <array>
#include <cctype>
#include <cstdio>

namespace evseq {

namespace {

using namespace std::chrono;

constexpr std::array<const char*, 7> kWeekdays = {"Mon", "Tue", "Wed", "Thu",
                                                  "Fri", "Sat", "Sun"};
constexpr std::array<const char*, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool digits(std::size_t count, int& out) {
    if (pos_ + count > s_.size()) return false;
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
      char c = s_[pos_ + i];
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
      value = value * 10 + (c - '0');
    }
    pos_ += count;
    out = value;
    return true;
  }

  bool literal(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::optional<char> peek() const {
    if (pos_ < s_.size()) return s_[pos_];
    return std::nullopt;
  }

  void advance() { ++pos_; }
  bool done() const { return pos_ == s_.size(); }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

bool read_date(Cursor& cur, Date& out) {
  int y = 0, m = 0, d = 0;
  if (!cur.digits(4, y) || !cur.literal('-') || !cur.digits(2, m) || !cur.literal('-') ||
      !cur.digits(2, d)) {
    return false;
  }
  Date ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  out = ymd;
  return true;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  Cursor cur(text);
  Date ymd;
  if (!read_date(cur, ymd)) return std::nullopt;
  if (!cur.literal('T') && !cur.literal('t') && !cur.literal(' ')) return std::nullopt;

  int hh = 0, mm = 0, ss = 0;
  if (!cur.digits(2, hh) || !cur.literal(':') || !cur.digits(2, mm) || !cur.literal(':') ||
      !cur.digits(2, ss)) {
    return std::nullopt;
  }
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;

  int millis = 0;
  if (cur.literal('.') || cur.literal(',')) {
    int ndigits = 0;
    while (auto c = cur.peek()) {
      if (!std::isdigit(static_cast<unsigned char>(*c))) break;
      if (ndigits < 3) millis = millis * 10 + (*c - '0');
      ++ndigits;
      cur.advance();
    }
    if (ndigits == 0) return std::nullopt;
    for (int i = ndigits; i < 3; ++i) millis *= 10;
  }

  int offset_minutes = 0;
  if (cur.literal('Z') || cur.literal('z')) {
  } else {
    int sign = 0;
    if (cur.literal('+')) {
      sign = 1;
    } else if (cur.literal('-')) {
      sign = -1;
    } else {
      return std::nullopt;
    }
    int oh = 0, om = 0;
    if (!cur.digits(2, oh)) return std::nullopt;
    cur.literal(':');
    if (!cur.digits(2, om)) return std::nullopt;
    if (oh > 23 || om > 59) return std::nullopt;
    offset_minutes = sign * (oh * 60 + om);
  }
  if (!cur.done()) return std::nullopt;

  auto local = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} + milliseconds{millis};
  return Timestamp{local - minutes{offset_minutes}};
}

std::string format_timestamp(Timestamp t) {
  auto day_point = floor<days>(t);
  Date ymd{day_point};
  auto rem = t - day_point;
  auto h = duration_cast<hours>(rem);
  rem -= h;
  auto m = duration_cast<minutes>(rem);
  rem -= m;
  auto s = duration_cast<seconds>(rem);
  rem -= s;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                static_cast<int>(m.count()), static_cast<int>(s.count()),
                static_cast<int>(rem.count()));
  return buf;
}

std::optional<Date> parse_date(std::string_view text) {
  Cursor cur(text);
  Date ymd;
  if (!read_date(cur, ymd) || !cur.done()) return std::nullopt;
  return ymd;
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

Date date_of(Timestamp t) { return Date{floor<days>(t)}; }

int weekday_index(Date d) {
  // iso_encoding: Monday = 1 ... Sunday = 7
  return static_cast<int>(weekday{sys_days{d}}.iso_encoding()) - 1;
}

int weekday_index(Timestamp t) { return weekday_index(date_of(t)); }

std::optional<int> parse_weekday(std::string_view name) {
  for (std::size_t i = 0; i < kWeekdays.size(); ++i) {
    std::string_view w = kWeekdays[i];
    if (name.size() < 3) break;
    bool match = true;
    for (std::size_t c = 0; c < 3; ++c) {
      if (std::tolower(static_cast<unsigned char>(name[c])) !=
          std::tolower(static_cast<unsigned char>(w[c]))) {
        match = false;
        break;
      }
    }
    if (match) return static_cast<int>(i);
  }
  return std::nullopt;
}

const char* weekday_name(int index) { return kWeekdays.at(static_cast<std::size_t>(index)); }
const char* month_name(int index) { return kMonths.at(static_cast<std::size_t>(index)); }

double seconds_between(Timestamp from, Timestamp to) {
  return static_cast<double>((to - from).count()) / 1000.0;
}

}  // namespace evseq
