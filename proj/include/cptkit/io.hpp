// io.hpp - text formats used by the command-line tool.
//
// Series input: one value per line, or two comma/whitespace separated columns
// (time, value) of which the second is used. A non-numeric first line is
// treated as a header.
//
// Detection output: "key: value" lines in a fixed order, e.g.
//   method: binseg
//   T: 40
//   changepoints: 21
//   segment_means: 0 5
//   sigma_hat: 0
//   threshold: 0
#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cptkit/core.hpp"

namespace cptkit::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto next = line.find_first_of(",; \t", pos);
    const auto field = line.substr(pos, next == std::string_view::npos ? next : next - pos);
    if (!field.empty()) fields.push_back(field);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return fields;
}

inline std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

inline std::optional<long long> parse_integer(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  long long value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Unreadable, "cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace detail

inline std::vector<double> parse_series_text(std::string_view text) {
  std::vector<double> values;
  std::size_t line_no = 0;
  bool first_content_line = true;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find('\n', pos);
    const auto raw = text.substr(pos, next == std::string_view::npos ? next : next - pos);
    pos = next == std::string_view::npos ? text.size() + 1 : next + 1;
    ++line_no;
    auto line = detail::trim(raw);
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line = line.substr(3);
    if (line.empty()) continue;

    const auto fields = detail::split_fields(line);
    std::optional<double> value;
    if (fields.size() == 1) {
      value = detail::parse_double(fields[0]);
    } else if (fields.size() == 2) {
      if (detail::parse_double(fields[0])) value = detail::parse_double(fields[1]);
    }
    if (!value) {
      if (first_content_line) {
        first_content_line = false;
        continue;  // header
      }
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) +
                                        ": expected a number or 'time,value', got '" +
                                        std::string(line) + "'");
    }
    if (!std::isfinite(*value)) {
      throw Error(ErrorCode::Parse,
                  "line " + std::to_string(line_no) + ": non-finite value");
    }
    first_content_line = false;
    values.push_back(*value);
  }
  return values;
}

inline TimeSeries read_series(const std::string& path) {
  auto values = parse_series_text(detail::read_file(path));
  if (values.size() < 2) {
    throw Error(ErrorCode::Parse, "'" + path + "' holds fewer than 2 observations");
  }
  return TimeSeries(std::move(values));
}

/// Changepoint list: either a detection result (its "changepoints:" line is
/// used) or bare integers separated by whitespace, commas or newlines.
inline ChangepointConfig parse_changepoints_text(std::string_view text,
                                                 std::size_t length) {
  std::string_view body = text;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto next = text.find('\n', pos);
    const auto line =
        detail::trim(text.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (line.substr(0, 13) == "changepoints:") {
      body = line.substr(13);
      break;
    }
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }

  std::vector<std::size_t> times;
  std::size_t start = 0;
  while (start < body.size()) {
    const auto next = body.find_first_of(",; \t\r\n", start);
    const auto token = body.substr(start, next == std::string_view::npos ? next : next - start);
    start = next == std::string_view::npos ? body.size() : next + 1;
    if (token.empty()) continue;
    const auto value = detail::parse_integer(token);
    if (!value) throw Error(ErrorCode::Parse, "not an integer: '" + std::string(token) + "'");
    if (*value < 2 || static_cast<unsigned long long>(*value) > length) {
      throw Error(ErrorCode::Parse, "changepoint time " + std::to_string(*value) +
                                        " outside (1, " + std::to_string(length) + "]");
    }
    if (!times.empty() && times.back() >= static_cast<std::size_t>(*value)) {
      throw Error(ErrorCode::Parse, "changepoint times must be strictly increasing");
    }
    times.push_back(static_cast<std::size_t>(*value));
  }
  return ChangepointConfig(length, std::move(times));
}

inline ChangepointConfig read_changepoints(const std::string& path, std::size_t length) {
  return parse_changepoints_text(detail::read_file(path), length);
}

struct DetectReport {
  std::string method;
  ChangepointConfig config;
  std::vector<double> segment_means;
  std::vector<std::pair<std::string, double>> diagnostics;
};

inline std::string format_number(double value) {
  std::ostringstream out;
  out << std::setprecision(10) << value;
  return out.str();
}

inline std::string format_detect_report(const DetectReport& report) {
  std::ostringstream out;
  out << "method: " << report.method << "\n";
  out << "T: " << report.config.series_length() << "\n";
  out << "changepoints:";
  for (auto t : report.config.times()) out << ' ' << t;
  out << "\nsegment_means:";
  for (auto m : report.segment_means) out << ' ' << format_number(m);
  out << "\n";
  for (const auto& [key, value] : report.diagnostics) {
    out << key << ": " << format_number(value) << "\n";
  }
  return out.str();
}

}  // namespace cptkit::io
