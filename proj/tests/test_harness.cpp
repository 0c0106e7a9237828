#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "twistrank/errors.hpp"
#include "twistrank/harness.hpp"

using namespace twistrank;
namespace fs = std::filesystem;

namespace {

const TwistFamily& congruent() {
  static const auto f = TwistFamily::make(std::array<std::int64_t, 3>{0, 1, -1});
  return f;
}

SweepConfig config_for(std::uint64_t N) {
  SweepConfig c;
  c.family = congruent();
  c.N = N;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("sweep totals match the sieve") {
  const auto t = sweep(config_for(100));
  CHECK(t.total == sieve_squarefree_coprime(100, 8).size());
  std::uint64_t s = 0;
  for (const auto& [d, c] : t.counts) s += c;
  CHECK(s == t.total);
  for (int k = 1; k <= 3; ++k) CHECK(t.moment_sums[static_cast<std::size_t>(k - 1)] >= std::pow(4.0, k) * t.total);
  auto both = config_for(100);
  both.positive_only = false;
  CHECK(sweep(both).total == 2 * t.total);
}

TEST_CASE("config validation") {
  auto c = config_for(0);
  CHECK_THROWS_AS(sweep(c), InvalidArgument);
  c = config_for(10);
  c.workers = 0;
  CHECK_THROWS_AS(sweep(c), InvalidArgument);
  c = config_for(10);
  c.range_lo = 8;
  c.range_hi = 4;
  CHECK_THROWS_AS(sweep(c), InvalidArgument);
  CHECK(config_for(10).hash() == config_for(10).hash());
  CHECK(config_for(10).hash() != config_for(11).hash());
}

TEST_CASE("window filter keeps omega inside the window") {
  auto c = config_for(20000);
  c.window_filter = true;
  for (auto b : eligible_twists(c)) {
    const int w = static_cast<int>(prime_factors(static_cast<std::uint64_t>(b)).size());
    CHECK(in_omega_window(w, 20000));
  }
  CHECK(sweep(c).total < sweep(config_for(20000)).total);
}

TEST_CASE("merging half-range sweeps equals the full sweep") {
  const auto full = sweep(config_for(3000));
  auto lo = config_for(3000), hi = config_for(3000);
  lo.range_hi = 1400;
  hi.range_lo = 1401;
  auto a = sweep(lo);
  const auto b = sweep(hi);
  auto merged = b;
  merged.merge(a);
  a.merge(b);
  CHECK(a == full);
  CHECK(merged == full);
  // arbitrary sharding
  DensityTable acc = empty_table(3000);
  for (std::uint64_t s = 1; s <= 3000; s += 377) {
    auto c = config_for(3000);
    c.range_lo = s;
    c.range_hi = std::min<std::uint64_t>(3000, s + 376);
    acc.merge(sweep(c));
  }
  CHECK(acc == full);
}

TEST_CASE("parity split per class matches parity_predict") {
  const auto t = sweep(config_for(10000));
  const auto& R = congruent().residues();
  for (const auto& [cls, split] : t.parity_by_class) {
    const int p = parity_for_class(congruent(), R.class_of(static_cast<std::int64_t>(cls)));
    if (p == 0)
      CHECK(split.odd == 0);
    else
      CHECK(split.even == 0);
  }
  CHECK(t.parity_by_class.size() == R.size());
}

TEST_CASE("record files, resume and worker independence") {
  TempDir dir("twistrank_harness_test");
  auto c = config_for(6000);
  c.output = dir.path / "fresh.jsonl";
  const auto fresh = sweep(c);
  const auto fresh_bytes = slurp(*c.output);

  auto c3 = c;
  c3.workers = 3;
  c3.output = dir.path / "three.jsonl";
  CHECK(sweep(c3) == fresh);
  CHECK(slurp(*c3.output) == fresh_bytes);

  SUBCASE("interrupt at half, resume") {
    auto part = c;
    part.output = dir.path / "part.jsonl";
    part.stop_after = fresh.total / 2;
    const auto half = sweep(part);
    CHECK(half.total == fresh.total / 2);
    part.stop_after = 0;
    const auto done = resume(part);
    CHECK(done == fresh);
    CHECK(slurp(*part.output) == fresh_bytes);
    const AlphaTable at = AlphaTable::make(20);
    CHECK(report(done, at, ReportFormat::Text) == report(fresh, at, ReportFormat::Text));
  }
  SUBCASE("corrupt trailing record is dropped") {
    auto part = c;
    part.output = dir.path / "corrupt.jsonl";
    part.stop_after = 700;
    sweep(part);
    {
      std::ofstream app(*part.output, std::ios::app);
      app << "{\"b\": 12";
    }
    const auto rf = read_record_file(*part.output);
    CHECK(rf.truncated_tail);
    CHECK(rf.records.size() == 700);
    part.stop_after = 0;
    CHECK(resume(part) == fresh);
    CHECK(slurp(*part.output) == fresh_bytes);
  }
  SUBCASE("empty file means a full run") {
    auto part = c;
    part.output = dir.path / "empty.jsonl";
    std::ofstream(*part.output).close();
    CHECK(resume(part) == fresh);
    CHECK(slurp(*part.output) == fresh_bytes);
  }
  SUBCASE("a different configuration is refused") {
    auto other = c;
    other.family = TwistFamily::make(std::array<std::int64_t, 3>{0, 1, 3});
    other.output = c.output;
    CHECK_THROWS_AS(resume(other), ConfigMismatch);
    auto otherN = c;
    otherN.N = 6001;
    CHECK_THROWS_AS(resume(otherN), ConfigMismatch);
  }
  SUBCASE("records reproduce under recomputation") {
    const auto rf = read_record_file(*c.output);
    CHECK(rf.header.N == 6000);
    CHECK(rf.header.config_hash == c.hash());
    CHECK(table_from_records(6000, rf.records) == fresh);
    for (std::size_t i = 0; i < rf.records.size(); i += 97) CHECK(rf.records[i] == selmer_rank(congruent(), rf.records[i].b));
  }
  SUBCASE("missing file is an I/O error") {
    CHECK_THROWS_AS(read_record_file(dir.path / "nope.jsonl"), IoError);
    auto bad = c;
    bad.output = dir.path / "no" / "such" / "dir.jsonl";
    CHECK_THROWS_AS(sweep(bad), IoError);
  }
}

TEST_CASE("record lines round-trip") {
  for (std::int64_t b : {1, 15, -105, 6}) {
    const auto r = selmer_rank(congruent(), b);
    CHECK(parse_record(record_line(r)) == r);
  }
  CHECK_THROWS(parse_record("{\"b\":"));
}

TEST_CASE("reports") {
  auto c = config_for(5000);
  const auto t = sweep(c);
  const auto at = AlphaTable::make(20);
  CHECK(parse_csv_report(report(t, at, ReportFormat::Csv)) == t);
  const auto text = report(t, at, ReportFormat::Text);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%10.6f", static_cast<double>(at.at(3)));
  CHECK(text.find(buf) != std::string::npos);
  CHECK(report(t, at, ReportFormat::PlotData).find("# series alpha_d") != std::string::npos);
  CHECK_THROWS_AS(parse_report_format("xml"), InvalidArgument);
  CHECK_THROWS_AS(report(empty_table(5), at, ReportFormat::Text), InvalidArgument);

  // first moment from raw records
  double s = 0;
  for (auto b : eligible_twists(c)) s += std::ldexp(1.0, selmer_rank(congruent(), b).selmer_dim);
  CHECK(t.moment(1) == doctest::Approx(s / static_cast<double>(t.total)).epsilon(1e-15));
  // alpha column of the CSV
  std::istringstream in(report(t, at, ReportFormat::Csv));
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.rfind("count,", 0) != 0) continue;
    std::istringstream ls(line);
    std::string sec, d, cnt, a;
    std::getline(ls, sec, ',');
    std::getline(ls, d, ',');
    std::getline(ls, cnt, ',');
    std::getline(ls, a, ',');
    CHECK(std::stod(a) == static_cast<double>(at.at(std::stoi(d))));
    ++rows;
  }
  CHECK(rows >= static_cast<int>(t.counts.size()));
}
