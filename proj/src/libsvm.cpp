#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "odapg/errors.hpp"
#include "odapg/objective.hpp"

namespace odapg {

namespace {

struct Entry {
  Index col;
  double value;
};

double parse_double(const std::string& token, long line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ParseError("bad number '" + token + "'", line);
  }
  if (used != token.size() || !std::isfinite(v)) throw ParseError("bad number '" + token + "'", line);
  return v;
}

}  // namespace

Dataset read_libsvm(const std::string& path, std::optional<Index> d_hint, LibsvmReadInfo* info) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open libsvm file '" + path + "'");

  std::vector<std::vector<Entry>> rows;
  std::vector<double> labels;
  Index max_col = 0;
  long remapped = 0;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string token;
    if (!(tokens >> token)) continue;

    double label = parse_double(token, lineno);
    if (label == 0.0) {
      label = -1.0;
      ++remapped;
    }
    if (label != 1.0 && label != -1.0) throw ParseError("label must be -1, 0 or +1", lineno);

    std::vector<Entry> row;
    Index last = 0;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) throw ParseError("expected idx:val, got '" + token + "'", lineno);
      long long idx = 0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + colon, idx);
      if (ec != std::errc() || ptr != token.data() + colon || idx < 1) {
        throw ParseError("bad feature index in '" + token + "'", lineno);
      }
      if (idx <= last) throw ParseError("feature indices must be strictly increasing", lineno);
      if (d_hint && idx > *d_hint) {
        throw ParseError("feature index " + std::to_string(idx) + " exceeds dimension " + std::to_string(*d_hint),
                         lineno);
      }
      last = idx;
      row.push_back({static_cast<Index>(idx - 1), parse_double(token.substr(colon + 1), lineno)});
    }
    max_col = std::max(max_col, last);
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  if (rows.empty()) throw EmptyDataset("no samples in '" + path + "'");

  const Index d = d_hint.value_or(max_col);
  if (d < 1) throw EmptyDataset("no features in '" + path + "'");
  Dataset data;
  data.features = Matrix::Zero(static_cast<Index>(rows.size()), d);
  data.labels.resize(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& e : rows[r]) data.features(static_cast<Index>(r), e.col) = e.value;
    data.labels(static_cast<Index>(r)) = labels[r];
  }
  if (info) info->remapped_zero_labels = remapped;
  return data;
}

std::vector<Dataset> partition(const Dataset& data, int m, PartitionScheme scheme, std::uint64_t seed) {
  const Index n = data.samples();
  if (m < 1) throw std::invalid_argument("partition: m must be positive");
  if (n < m) throw EmptyDataset("partition: " + std::to_string(n) + " samples cannot cover " + std::to_string(m) + " agents");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<std::vector<Index>> assigned(static_cast<std::size_t>(m));
  if (scheme == PartitionScheme::contiguous) {
    const Index base = n / m;
    const Index extra = n % m;
    Index next = 0;
    for (int a = 0; a < m; ++a) {
      const Index size = base + (a < extra ? 1 : 0);
      for (Index k = 0; k < size; ++k) assigned[a].push_back(order[next++]);
    }
  } else {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    for (Index k = 0; k < n; ++k) assigned[k % m].push_back(order[k]);
  }

  std::vector<Dataset> parts(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) {
    const auto& rows = assigned[a];
    parts[a].features.resize(static_cast<Index>(rows.size()), data.dim());
    parts[a].labels.resize(static_cast<Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      parts[a].features.row(static_cast<Index>(k)) = data.features.row(rows[k]);
      parts[a].labels(static_cast<Index>(k)) = data.labels(rows[k]);
    }
  }
  return parts;
}

}  // namespace odapg
