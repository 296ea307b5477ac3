#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "odapg/errors.hpp"
#include "odapg/metrics.hpp"

namespace odapg {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_field_double(const std::string& s, long line) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad number '" + s + "'", line);
  return v;
}

template <class Int>
Int parse_field_int(const std::string& s, long line) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad integer '" + s + "'", line);
  return v;
}

}  // namespace

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& rows) {
  out << kMetricsCsvHeader << "\n";
  for (const auto& r : rows) {
    out << r.t << ',' << format_double(r.suboptimality) << ',' << format_double(r.sq_dist) << ','
        << format_double(r.consensus_x) << ',' << format_double(r.consensus_z) << ','
        << format_double(r.consensus_s) << ',' << r.grads_cumulative << ',' << r.rounds_cumulative << ','
        << format_double(r.wall_ms) << "\n";
  }
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_metrics_csv(out, rows);
  if (!out) throw Error("write to '" + path + "' failed");
}

std::vector<MetricsRecord> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsCsvHeader) throw ParseError("unexpected metrics CSV header", 1);
  std::vector<MetricsRecord> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 9) throw ParseError("expected 9 fields, got " + std::to_string(fields.size()), lineno);
    MetricsRecord r;
    r.t = parse_field_int<int>(fields[0], lineno);
    r.suboptimality = parse_field_double(fields[1], lineno);
    r.sq_dist = parse_field_double(fields[2], lineno);
    r.consensus_x = parse_field_double(fields[3], lineno);
    r.consensus_z = parse_field_double(fields[4], lineno);
    r.consensus_s = parse_field_double(fields[5], lineno);
    r.grads_cumulative = parse_field_int<long long>(fields[6], lineno);
    r.rounds_cumulative = parse_field_int<long long>(fields[7], lineno);
    r.wall_ms = parse_field_double(fields[8], lineno);
    rows.push_back(r);
  }
  return rows;
}

std::vector<MetricsRecord> read_metrics_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_metrics_csv(in);
}

}  // namespace odapg
