/*
 * Copyright (C) 2026 The cargotrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cargotrack/time_util.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

#include "cargotrack/errors.hpp"

namespace cargotrack {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian civil date. Negative
// years and pre-epoch dates work, though the wire formats never emit them.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);             // [0, 399]
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;   // [0, 365]
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;            // [0, 146096]
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

bool all_digits(const std::string& s, std::size_t from, std::size_t count) {
  if (from + count > s.size()) return false;
  for (std::size_t i = from; i < from + count; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

int read_int(const std::string& s, std::size_t from, std::size_t count) {
  int v = 0;
  for (std::size_t i = from; i < from + count; ++i) v = v * 10 + (s[i] - '0');
  return v;
}

[[noreturn]] void bad(const std::string& text) {
  throw ParseError("unrecognized timestamp: \"" + text + "\"");
}

EpochMs parse_rfc3339(const std::string& text) {
  // YYYY-MM-DDTHH:MM:SS[.frac](Z|+HH:MM|-HH:MM)
  if (text.size() < 20 || !all_digits(text, 0, 4) || text[4] != '-' || !all_digits(text, 5, 2) ||
      text[7] != '-' || !all_digits(text, 8, 2) || (text[10] != 'T' && text[10] != 't') ||
      !all_digits(text, 11, 2) || text[13] != ':' || !all_digits(text, 14, 2) ||
      text[16] != ':' || !all_digits(text, 17, 2)) {
    bad(text);
  }
  const int year = read_int(text, 0, 4);
  const int month = read_int(text, 5, 2);
  const int day = read_int(text, 8, 2);
  const int hour = read_int(text, 11, 2);
  const int minute = read_int(text, 14, 2);
  const int second = read_int(text, 17, 2);
  if (month < 1 || month > 12 || day < 1 || hour > 23 || minute > 59 || second > 60) {
    bad(text);
  }
  static constexpr int kDaysInMonth[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (day > (month == 2 && leap ? 29 : kDaysInMonth[month - 1])) bad(text);

  std::size_t pos = 19;
  EpochMs frac_ms = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t frac_begin = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == frac_begin) bad(text);
    // Keep the first three fractional digits; everything finer truncates.
    for (std::size_t i = 0; i < 3; ++i) {
      frac_ms *= 10;
      if (frac_begin + i < pos) frac_ms += text[frac_begin + i] - '0';
    }
  }

  if (pos >= text.size()) bad(text);
  EpochMs offset_ms = 0;
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '+' ? 1 : -1;
    ++pos;
    if (!all_digits(text, pos, 2) || pos + 5 > text.size() || text[pos + 2] != ':' ||
        !all_digits(text, pos + 3, 2)) {
      bad(text);
    }
    const int oh = read_int(text, pos, 2);
    const int om = read_int(text, pos + 3, 2);
    if (oh > 23 || om > 59) bad(text);
    offset_ms = sign * (static_cast<EpochMs>(oh) * 3600 + om * 60) * 1000;
    pos += 5;
  } else {
    bad(text);
  }
  if (pos != text.size()) bad(text);

  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                            static_cast<unsigned>(day));
  const EpochMs local_ms =
      (days * 86400 + hour * 3600 + minute * 60 + second) * 1000 + frac_ms;
  return local_ms - offset_ms;
}

}  // namespace

EpochMs parse_timestamp(const std::string& text) {
  if (text.empty()) throw ParseError("empty timestamp");
  // Bare integers (optionally signed) are epoch milliseconds.
  std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (i < text.size() && all_digits(text, i, text.size() - i)) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (errno != 0 || end != text.c_str() + text.size()) bad(text);
    return v;
  }
  return parse_rfc3339(text);
}

std::string format_utc(EpochMs ts) {
  std::int64_t days = ts / 86400000;
  std::int64_t rem = ts % 86400000;
  if (rem < 0) {
    rem += 86400000;
    --days;
  }
  std::int64_t year;
  unsigned month, day;
  civil_from_days(days, year, month, day);
  const int hour = static_cast<int>(rem / 3600000);
  const int minute = static_cast<int>(rem / 60000 % 60);
  const int second = static_cast<int>(rem / 1000 % 60);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<long long>(year), month, day, hour, minute, second);
  return buf;
}

std::string format_utc_minutes(EpochMs ts) {
  const std::string full = format_utc(ts);
  // "YYYY-MM-DDTHH:MM:SSZ" -> "YYYY-MM-DD HH:MM"
  std::string out = full.substr(0, 16);
  out[10] = ' ';
  return out;
}

}  // namespace cargotrack
