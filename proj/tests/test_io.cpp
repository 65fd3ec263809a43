#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "fsign/errors.hpp"
#include "fsign/hilbert.hpp"
#include "fsign/io.hpp"
#include "fsign/rng.hpp"
#include "helpers.hpp"

using namespace fsign;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("fsign-io-test-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("sample roundtrip is bit exact") {
  TempDir tmp;
  const GridPtr g = make_equidistant_grid(5);
  rng::Stream rs(1);
  std::vector<Curve> sample;
  for (int i = 0; i < 4; ++i) {
    Curve c(g);
    for (auto& v : c.values) v = rs.normal() * std::pow(10.0, rs.normal() * 40.0);
    sample.push_back(std::move(c));
  }
  sample[1].values[2] = 0.0;
  sample[2].values[0] = -1.0 / 3.0;

  const std::string path = tmp.file("sample.csv");
  io::write_sample_csv(path, sample);
  REQUIRE(fs::exists(io::sidecar_path(path)));

  const auto back = io::read_sample_csv(path);
  REQUIRE(back.size() == sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    REQUIRE(back[i].grid->size() == 5);
    for (std::size_t j = 0; j < 5; ++j) REQUIRE(back[i].values[j] == sample[i].values[j]);
  }
}

TEST_CASE("curve roundtrip") {
  TempDir tmp;
  const GridPtr g = make_equidistant_grid(3);
  const Curve c = th::curve(g, {1.25, -7.5e-300, 3.333333333333333});
  const std::string path = tmp.file("curve.csv");
  io::write_curve_csv(path, c);
  const Curve back = io::read_curve_csv(path);
  for (std::size_t j = 0; j < 3; ++j) REQUIRE(back.values[j] == c.values[j]);
}

TEST_CASE("ragged rows are rejected") {
  TempDir tmp;
  const std::string path = tmp.file("ragged.csv");
  std::ofstream out(path);
  out << "1,2,3\n4,5\n";
  out.close();
  CHECK_THROWS_AS(io::read_sample_csv(path), InvalidArgument);
}

TEST_CASE("junk cells are rejected") {
  TempDir tmp;
  const std::string path = tmp.file("junk.csv");
  std::ofstream out(path);
  out << "1,2,3\n4,five,6\n";
  out.close();
  CHECK_THROWS_AS(io::read_sample_csv(path), InvalidArgument);
}

TEST_CASE("missing file is rejected") {
  CHECK_THROWS_AS(io::read_sample_csv("/nonexistent/fsign/sample.csv"), InvalidArgument);
}

TEST_CASE("sidecar mismatch is rejected") {
  TempDir tmp;
  const std::string path = tmp.file("mismatch.csv");
  std::ofstream out(path);
  out << "1,2,3\n";
  out.close();
  std::ofstream side(io::sidecar_path(path));
  side << "{\"m\": 4, \"rule\": \"equidistant\"}";
  side.close();
  CHECK_THROWS_AS(io::read_sample_csv(path), InvalidArgument);

  std::ofstream side2(io::sidecar_path(path));
  side2 << "{\"m\": 3, \"rule\": \"chebyshev\"}";
  side2.close();
  CHECK_THROWS_AS(io::read_sample_csv(path), InvalidArgument);

  std::ofstream side3(io::sidecar_path(path));
  side3 << "{\"m\": 3, \"rule\": \"equidistant\"}";
  side3.close();
  CHECK_NOTHROW(io::read_sample_csv(path));
}

TEST_CASE("matrix roundtrip") {
  TempDir tmp;
  const std::string path = tmp.file("matrix.csv");
  const std::vector<double> data{1.0, -2.5, 3.25, 1e-17, 0.0, 9e99};
  io::write_matrix_csv(path, data, 2, 3);
  const auto back = io::read_matrix_csv(path);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    REQUIRE(back[i].size() == 3);
    for (std::size_t j = 0; j < 3; ++j) REQUIRE(back[i][j] == data[i * 3 + j]);
  }
}

TEST_CASE("format_full renders roundtrippable decimals") {
  // strtod instead of std::stod: the latter reports subnormal results as
  // out_of_range even though they parse exactly.
  for (double v : {0.1, -1.0 / 3.0, 1e308, 5e-324, 0.0}) {
    const std::string s = io::format_full(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("sidecar path derivation") {
  CHECK(io::sidecar_path("a/b/sample.csv") == "a/b/sample.grid.json");
  CHECK(io::sidecar_path("noext") == "noext.grid.json");
}
