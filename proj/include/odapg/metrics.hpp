#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace odapg {

// Diagnostics after t completed iterations (state index t + 1).
struct MetricsRecord {
  int t = 0;
  double suboptimality = 0.0;  // F(y_bar) - F*, NaN without a reference
  double sq_dist = 0.0;        // ||z - 1 x*||^2, NaN without a reference
  double consensus_x = 0.0;
  double consensus_z = 0.0;
  double consensus_s = 0.0;
  long long grads_cumulative = 0;
  long long rounds_cumulative = 0;
  double wall_ms = 0.0;

  bool operator==(const MetricsRecord&) const = default;
};

// Fixed CSV header, column order matches MetricsRecord.
inline constexpr const char* kMetricsCsvHeader =
    "t,suboptimality,sq_dist,consensus_x,consensus_z,consensus_s,grads_cumulative,rounds_cumulative,wall_ms";

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& rows);
void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& rows);
// Throws ParseError on a malformed row or header.
std::vector<MetricsRecord> read_metrics_csv(std::istream& in);
std::vector<MetricsRecord> read_metrics_csv(const std::string& path);

}  // namespace odapg
