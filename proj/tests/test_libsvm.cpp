#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include "odapg/errors.hpp"
#include "odapg/objective.hpp"

using namespace odapg;

namespace {

struct TempFile {
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = (std::filesystem::temp_directory_path() / ("odapg_libsvm_" + std::to_string(::getpid()) + "_" +
                                                      std::to_string(counter++) + ".txt"))
               .string();
    std::ofstream(path) << contents;
  }
  ~TempFile() { std::filesystem::remove(path); }
  std::string path;
};

}  // namespace

TEST_CASE("libsvm line with explicit dimension") {
  TempFile f("+1 1:0.5 3:2\n");
  const Dataset d = read_libsvm(f.path, 3);
  REQUIRE(d.samples() == 1);
  CHECK(d.dim() == 3);
  CHECK(d.features(0, 0) == 0.5);
  CHECK(d.features(0, 1) == 0.0);
  CHECK(d.features(0, 2) == 2.0);
  CHECK(d.labels(0) == 1.0);
}

TEST_CASE("zero labels are remapped to -1") {
  TempFile f("0 1:1\n1 2:1\n");
  LibsvmReadInfo info;
  const Dataset d = read_libsvm(f.path, std::nullopt, &info);
  CHECK(d.labels(0) == -1.0);
  CHECK(d.labels(1) == 1.0);
  CHECK(d.dim() == 2);
  CHECK(info.remapped_zero_labels == 1);
}

TEST_CASE("libsvm parse errors carry the line number") {
  TempFile bad_pair("+1 1:0.5\n-1 2-3\n");
  try {
    read_libsvm(bad_pair.path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  TempFile bad_label("3 1:1\n");
  CHECK_THROWS_AS(read_libsvm(bad_label.path), ParseError);
  TempFile too_wide("+1 5:1\n");
  CHECK_THROWS_AS(read_libsvm(too_wide.path, 3), ParseError);
  TempFile unordered("+1 3:1 2:1\n");
  CHECK_THROWS_AS(read_libsvm(unordered.path), ParseError);
  TempFile empty("\n# only a comment\n");
  CHECK_THROWS_AS(read_libsvm(empty.path), EmptyDataset);
}

TEST_CASE("partition sizes and schemes") {
  Dataset data;
  data.features = Matrix::Zero(10, 2);
  data.labels = Vector::Ones(10);
  for (Index r = 0; r < 10; ++r) data.features(r, 0) = static_cast<double>(r);

  const auto parts = partition(data, 3, PartitionScheme::contiguous);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].samples() == 4);
  CHECK(parts[1].samples() == 3);
  CHECK(parts[2].samples() == 3);
  CHECK(parts[1].features(0, 0) == 4.0);

  const auto rr = partition(data, 3, PartitionScheme::round_robin, 17);
  double total = 0.0;
  for (const auto& p : rr) total += p.features.col(0).sum();
  CHECK(total == 45.0);
  CHECK(rr[0].samples() == 4);
  const auto rr2 = partition(data, 3, PartitionScheme::round_robin, 17);
  CHECK(rr[2].features == rr2[2].features);

  CHECK_THROWS_AS(partition(data, 11, PartitionScheme::contiguous), EmptyDataset);
}
