#include "cogsearch/util/time.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace cogsearch {

Timestamp system_now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
}

namespace {

int read_int(std::string_view s, size_t& pos, size_t width) {
  if (pos + width > s.size()) throw std::invalid_argument("truncated timestamp");
  int v = 0;
  for (size_t i = 0; i < width; ++i) {
    char c = s[pos + i];
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("bad digit in timestamp");
    }
    v = v * 10 + (c - '0');
  }
  pos += width;
  return v;
}

void expect(std::string_view s, size_t& pos, char c) {
  if (pos >= s.size() || (s[pos] != c && !(c == 'T' && (s[pos] == 't' || s[pos] == ' ')))) {
    throw std::invalid_argument("malformed timestamp");
  }
  ++pos;
}

}  // namespace

Timestamp parse_rfc3339(std::string_view s) {
  using namespace std::chrono;
  size_t p = 0;
  int y = read_int(s, p, 4);
  expect(s, p, '-');
  int mo = read_int(s, p, 2);
  expect(s, p, '-');
  int d = read_int(s, p, 2);
  expect(s, p, 'T');
  int hh = read_int(s, p, 2);
  expect(s, p, ':');
  int mi = read_int(s, p, 2);
  expect(s, p, ':');
  int ss = read_int(s, p, 2);
  int ms = 0;
  if (p < s.size() && s[p] == '.') {
    ++p;
    int digits = 0;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) {
      if (digits < 3) ms = ms * 10 + (s[p] - '0');
      ++digits;
      ++p;
    }
    if (digits == 0) throw std::invalid_argument("empty fraction in timestamp");
    for (int i = digits; i < 3; ++i) ms *= 10;
  }
  if (p >= s.size()) throw std::invalid_argument("missing timezone in timestamp");
  int offset_min = 0;
  if (s[p] == 'Z' || s[p] == 'z') {
    ++p;
  } else if (s[p] == '+' || s[p] == '-') {
    int sign = s[p] == '-' ? -1 : 1;
    ++p;
    int oh = read_int(s, p, 2);
    expect(s, p, ':');
    int om = read_int(s, p, 2);
    offset_min = sign * (oh * 60 + om);
  } else {
    throw std::invalid_argument("bad timezone in timestamp");
  }
  if (p != s.size()) throw std::invalid_argument("trailing characters in timestamp");

  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mi > 59 || ss > 60) {
    throw std::invalid_argument("out-of-range timestamp field");
  }
  auto t = sys_days{ymd} + hours{hh} + minutes{mi} + seconds{ss} + milliseconds{ms} -
           minutes{offset_min};
  return time_point_cast<milliseconds>(t);
}

std::string format_rfc3339(Timestamp t) {
  using namespace std::chrono;
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
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

}  // namespace cogsearch
