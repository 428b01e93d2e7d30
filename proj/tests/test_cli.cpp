#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "janossy/cli.hpp"

using namespace janossy::cli;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("grid specifications") {
  CHECK(parse_grid("2.5") == std::vector<double>{2.5});
  CHECK(parse_grid("0:1:0.25") == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(parse_grid("-7:5:0.1").size() == 121);
  CHECK(parse_grid("1:1:1") == std::vector<double>{1.0});
  CHECK(parse_grid("0:0.95:0.1").size() == 10);
  for (const char* bad : {"", "a", "1:2", "1:2:3:4", "0:1:0", "0:1:-1", "1:0:0.1", "1:2:",
                          "nan", "inf", "1x", "0:1e9:1e-3"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_grid(bad), std::invalid_argument);
  }
}

TEST_CASE("numbers round-trip") {
  for (double x : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.96937}) {
    CHECK(std::stod(format_number(x)) == x);
  }
}

TEST_CASE("gap table") {
  const Result r = invoke({"gap", "--family", "bessel", "--nu", "0", "--s", "1:3:1", "--p", "2"});
  REQUIRE(r.code == kExitOk);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"s", "E0", "E1", "E2"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double s = std::stod(rows[i][0]);
    CHECK(s == doctest::Approx(static_cast<double>(i)));
    CHECK(std::abs(std::stod(rows[i][1]) - std::exp(-s / 4.0)) < 1e-10);
    double total = 0.0;
    for (std::size_t j = 1; j < rows[i].size(); ++j) total += std::stod(rows[i][j]);
    CHECK(total <= 1.0 + 1e-12);
  }
  const Result airy = invoke({"gap", "--s", "-7:5:0.1", "--p", "0"});
  REQUIRE(airy.code == kExitOk);
  CHECK(parse_csv(airy.out).size() == 122);
  CHECK(invoke({"gap", "--s", "0", "--route", "tw"}).code == kExitConfig);
}

TEST_CASE("joint density as JSON") {
  const Result r = invoke({"joint", "--t", "-1", "--s", "-3:-0.5:0.5", "--format", "json"});
  REQUIRE(r.code == kExitOk);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["meta"]["command"] == "joint");
  CHECK(doc["meta"]["family"] == "airy");
  CHECK(doc["meta"]["route"] == "tw");
  CHECK(doc["meta"].contains("epsilon"));
  CHECK(doc["meta"].contains("M"));
  CHECK(doc["meta"].contains("lambda"));
  const auto& rows = doc["rows"];
  REQUIRE(rows.size() == 6);
  for (const auto& row : rows) {
    CHECK(row.contains("t"));
    CHECK(row.contains("s"));
    CHECK(row["P12"].get<double>() >= -1e-8);
    if (row["s"].get<double>() >= -1.0) CHECK(row["P12"].get<double>() == 0.0);
  }
  const Result ny = invoke({"joint", "--t", "-1", "--s", "-2", "--route", "nystrom"});
  const Result tw = invoke({"joint", "--t", "-1", "--s", "-2"});
  const double a = std::stod(parse_csv(ny.out)[1][2]);
  const double b = std::stod(parse_csv(tw.out)[1][2]);
  CHECK(std::abs(a / b - 1.0) < 1e-5);
}

TEST_CASE("singular-value variables") {
  const Result plain = invoke({"joint", "--family", "bessel", "--t", "1", "--s", "4"});
  const Result sv =
      invoke({"joint", "--family", "bessel", "--t", "1", "--s", "2", "--singular"});
  REQUIRE(plain.code == kExitOk);
  REQUIRE(sv.code == kExitOk);
  const double p = std::stod(parse_csv(plain.out)[1][2]);
  const double q = std::stod(parse_csv(sv.out)[1][2]);
  CHECK(std::abs(q - 4.0 * 1.0 * 2.0 * p) < 1e-12 * q);
  CHECK(invoke({"joint", "--t", "1", "--s", "2", "--singular"}).code == kExitConfig);
}

TEST_CASE("validation against Nystrom") {
  const Result r = invoke({"validate", "--t", "-2", "--s", "-5:1:1"});
  REQUIRE(r.code == kExitOk);
  const auto rows = parse_csv(r.out);
  CHECK(rows[0] == std::vector<std::string>{"t", "s", "tw", "nystrom", "rel_dev"});
  CHECK(rows.size() == 8);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::abs(std::stod(rows[i][4])) < 1e-6);
  CHECK(r.err.find("PASS") != std::string::npos);
  const Result strict = invoke({"validate", "--t", "-2", "--s", "-5:1:1", "--threshold", "1e-20"});
  CHECK(strict.code == kExitNumerical);
  CHECK(strict.err.find("FAIL") != std::string::npos);
}

TEST_CASE("sampling") {
  const Result r = invoke({"sample", "--n", "32", "--count", "50", "--seed", "4"});
  REQUIRE(r.code == kExitOk);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 51);
  CHECK(rows[0] == std::vector<std::string>{"first", "second"});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][0]) >= std::stod(rows[i][1]));
  CHECK(invoke({"sample", "--n", "32", "--count", "50", "--seed", "4"}).out == r.out);
  const Result w = invoke({"sample", "--ensemble", "wishart", "--n", "32", "--count", "20"});
  REQUIRE(w.code == kExitOk);
  CHECK(invoke({"sample", "--ensemble", "wishart", "--nu", "0.5"}).code == kExitConfig);
  CHECK(invoke({"sample", "--n", "8"}).code == kExitConfig);
  CHECK(invoke({"sample", "--count", "0"}).code == kExitConfig);
}

TEST_CASE("selftest") {
  const Result r = invoke({"selftest"});
  REQUIRE(r.code == kExitOk);
  const auto rows = parse_csv(r.out);
  CHECK(rows[0] == std::vector<std::string>{"identity", "max_error", "tolerance", "status"});
  CHECK(rows.size() == 6);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][3] == "PASS");
    CHECK(std::stod(rows[i][1]) <= std::stod(rows[i][2]));
  }
  CHECK(invoke({"selftest"}).out == r.out);
}

TEST_CASE("output file") {
  const std::string path = "test_cli_output.csv";
  const Result r = invoke({"gap", "--s", "0", "--output", path});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream content;
  content << in.rdbuf();
  CHECK(content.str() == invoke({"gap", "--s", "0"}).out);
  std::remove(path.c_str());
}

TEST_CASE("configuration errors") {
  for (const std::vector<std::string>& args :
       std::vector<std::vector<std::string>>{{},
                                             {"unknown"},
                                             {"gap"},
                                             {"gap", "--s", "1:0:1"},
                                             {"gap", "--s", "0", "--family", "sine"},
                                             {"gap", "--s", "1", "--family", "bessel", "--nu", "-2"},
                                             {"gap", "--s", "0", "--M", "4"},
                                             {"gap", "--s", "0", "--format", "xml"},
                                             {"joint", "--t", "0", "--s", "-1", "--epsilon", "1e-3"},
                                             {"joint", "--t", "0", "--s", "-1", "--route", "exact"},
                                             {"joint", "--family", "bessel", "--t", "1", "--s",
                                              "2", "--mu", "1e-6"},
                                             {"gap", "--s", "0", "--lambda", "5"},
                                             {"gap", "--s", "0", "--threads", "-1"}}) {
    const Result r = invoke(args);
    CAPTURE(r.err);
    CHECK(r.code == kExitConfig);
    CHECK_FALSE(r.err.empty());
  }
}
