#include "bisons/data_io.hpp"

#include "bisons/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace bisons {

namespace {

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits on commas and parses each field; returns false on a bad field.
bool parse_row(std::string_view line, std::vector<double>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view field =
        trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
      return false;
    }
    out.push_back(v);
    if (comma == std::string_view::npos) return true;
    start = comma + 1;
  }
}

bool is_header(std::string_view line) {
  const std::string_view t = trim(line);
  return !t.empty() && (t.front() == 'a' || t.front() == 'A');
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::kIo, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::kIo, "cannot write " + path);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<ReturnsVec> parse_returns(std::istream& in, const std::string& source) {
  std::vector<ReturnsVec> rows;
  std::string line;
  std::vector<double> values;
  std::size_t lineno = 0;
  int d = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (lineno == 1 && is_header(line)) {
      d = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
      continue;
    }
    if (!parse_row(line, values)) {
      fail(Errc::kParse, where(source, lineno) + "expected comma-separated numbers");
    }
    if (d < 0) d = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != d) {
      fail(Errc::kParse, where(source, lineno) + "expected " + std::to_string(d) +
                             " columns, found " + std::to_string(values.size()));
    }
    try {
      rows.push_back(normalize_returns(std::span<const double>(values)));
    } catch (const Error& e) {
      fail(Errc::kInvalidReturns, where(source, lineno) + "row " +
                                      std::to_string(rows.size() + 1) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<ReturnsVec> load_returns(const std::string& path) {
  std::ifstream in = open_in(path);
  return parse_returns(in, path);
}

void write_returns(std::ostream& out, const std::vector<ReturnsVec>& returns) {
  if (returns.empty()) return;
  const int d = returns.front().dim();
  for (int i = 0; i < d; ++i) out << (i ? "," : "") << 'a' << (i + 1);
  out << '\n';
  for (const ReturnsVec& r : returns) {
    for (int i = 0; i < d; ++i) out << (i ? "," : "") << format_double(r[i]);
    out << '\n';
  }
}

void save_returns(const std::string& path, const std::vector<ReturnsVec>& returns) {
  std::ofstream out = open_out(path);
  write_returns(out, returns);
}

std::vector<MeasurementEvent> parse_measurements(std::istream& in, const std::string& source) {
  std::vector<MeasurementEvent> events;
  std::string line;
  std::vector<double> values;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!parse_row(line, values)) {
      fail(Errc::kParse, where(source, lineno) + "expected comma-separated numbers");
    }
    const std::size_t n = values.size();
    const int d = static_cast<int>(std::lround(std::sqrt((static_cast<double>(n) - 1.0) / 2.0)));
    if (d < 1 || static_cast<std::size_t>(2 * d * d + 1) != n) {
      fail(Errc::kParse, where(source, lineno) + "expected 2 d^2 + 1 values, found " +
                             std::to_string(n));
    }
    if (!events.empty() && events.front().effect.dim() != d) {
      fail(Errc::kParse, where(source, lineno) + "dimension differs from the first row");
    }
    CMat e(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const std::size_t k = 2 * static_cast<std::size_t>(i * d + j);
        e(i, j) = Complex(values[k], values[k + 1]);
      }
    }
    try {
      events.emplace_back(HermitianMatrix(e), values.back());
    } catch (const Error& err) {
      fail(Errc::kInvalidArgument, where(source, lineno) + "row " +
                                       std::to_string(events.size() + 1) + ": " + err.what());
    }
  }
  return events;
}

std::vector<MeasurementEvent> load_measurements(const std::string& path) {
  std::ifstream in = open_in(path);
  return parse_measurements(in, path);
}

void write_measurements(std::ostream& out, const std::vector<MeasurementEvent>& events) {
  for (const MeasurementEvent& ev : events) {
    const int d = ev.effect.dim();
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const Complex z = ev.effect(i, j);
        out << format_double(z.real()) << ',' << format_double(z.imag()) << ',';
      }
    }
    out << format_double(ev.outcome) << '\n';
  }
}

void save_measurements(const std::string& path, const std::vector<MeasurementEvent>& events) {
  std::ofstream out = open_out(path);
  write_measurements(out, events);
}

}  // namespace bisons
