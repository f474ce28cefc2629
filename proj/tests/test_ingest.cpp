#include <doctest.h>

#include <algorithm>
#include <random>

#include "mnec/ingest.hpp"
#include "test_util.hpp"

using namespace mnec;
using testutil::TempDir;
using testutil::write_file;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an mnec::Error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("flows: two rows become a 2x2 matrix") {
  TempDir dir;
  write_file(dir / "f.csv", "from,to,count\nA,B,10\nB,A,4\n");
  const auto f = load_flows(dir / "f.csv");
  REQUIRE(f.codes == std::vector<std::string>{"A", "B"});
  CHECK(f.counts(0, 0) == 0.0);
  CHECK(f.counts(0, 1) == 10.0);
  CHECK(f.counts(1, 0) == 4.0);
  CHECK(f.counts(1, 1) == 0.0);
  CHECK(f.scheme == Scheme::Source);
}

TEST_CASE("flows: self-flow is stored and flagged") {
  TempDir dir;
  write_file(dir / "f.csv", "from,to,count\nA,A,7\nA,B,1\n");
  Warnings w;
  const auto f = load_flows(dir / "f.csv", &w);
  CHECK(f.counts(f.index_of("A"), f.index_of("A")) == 7.0);
  CHECK(w.size() == 1);
}

TEST_CASE("flows: rejects negatives, duplicates, junk") {
  TempDir dir;
  write_file(dir / "neg.csv", "from,to,count\nA,B,-1\n");
  CHECK(kind_of([&] { load_flows(dir / "neg.csv"); }) == ErrorKind::Validation);
  write_file(dir / "dup.csv", "from,to,count\nA,B,1\nA,B,2\n");
  CHECK(kind_of([&] { load_flows(dir / "dup.csv"); }) == ErrorKind::Validation);
  write_file(dir / "junk.csv", "from,to,count\nA,B,x1\n");
  CHECK(kind_of([&] { load_flows(dir / "junk.csv"); }) == ErrorKind::Parse);
  write_file(dir / "hdr.csv", "a,b,c\nA,B,1\n");
  CHECK(kind_of([&] { load_flows(dir / "hdr.csv"); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { load_flows(dir / "missing.csv"); }) == ErrorKind::Io);
}

TEST_CASE("flows: codes keep leading zeros") {
  TempDir dir;
  write_file(dir / "f.csv", "from,to,count\n0121,0122,3.5\n");
  const auto f = load_flows(dir / "f.csv");
  CHECK(f.codes == std::vector<std::string>{"0121", "0122"});
  CHECK(f.counts(0, 1) == 3.5);
}

TEST_CASE("panel: single record") {
  TempDir dir;
  write_file(dir / "p.csv", "industry,region,year,emp_dom,emp_mne\n1071,Dublin,2006,120,30\n");
  const auto p = load_panel(dir / "p.csv");
  REQUIRE(p.records.size() == 1);
  CHECK(p.records[0] == PanelRecord{"1071", "Dublin", 2006, 120, 30});
}

TEST_CASE("panel: duplicate key, bad integers, empty file") {
  TempDir dir;
  write_file(dir / "dup.csv", "industry,region,year,emp_dom,emp_mne\nA,R,2006,1,1\nA,R,2006,2,2\n");
  CHECK(kind_of([&] { load_panel(dir / "dup.csv"); }) == ErrorKind::Validation);
  write_file(dir / "bad.csv", "industry,region,year,emp_dom,emp_mne\nA,R,2006.5,1,1\n");
  CHECK(kind_of([&] { load_panel(dir / "bad.csv"); }) == ErrorKind::Parse);
  write_file(dir / "bad2.csv", "industry,region,year,emp_dom,emp_mne\nA,R,2006,1.5,1\n");
  CHECK(kind_of([&] { load_panel(dir / "bad2.csv"); }) == ErrorKind::Parse);
  write_file(dir / "empty.csv", "industry,region,year,emp_dom,emp_mne\n");
  CHECK(load_panel(dir / "empty.csv").records.empty());
}

TEST_CASE("panel: records sorted by region, industry, year; order-insensitive") {
  std::vector<PanelRecord> recs;
  for (const char* r : {"R2", "R1"})
    for (const char* i : {"B", "A", "C"})
      for (int y : {2007, 2006}) recs.push_back({i, r, y, y - 2000, 1});
  const auto base = make_panel(recs);
  for (std::size_t k = 1; k < base.records.size(); ++k) {
    const auto& a = base.records[k - 1];
    const auto& b = base.records[k];
    CHECK(std::tie(a.region, a.industry, a.year) < std::tie(b.region, b.industry, b.year));
  }
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(recs.begin(), recs.end(), rng);
    CHECK(make_panel(recs).records == base.records);
  }
  CHECK(base.industries() == std::vector<std::string>{"A", "B", "C"});
  CHECK(base.regions() == std::vector<std::string>{"R1", "R2"});
  CHECK(base.years() == std::vector<int>{2006, 2007});
}

TEST_CASE("crosswalk: pairs, dedup, coverage") {
  TempDir dir;
  write_file(dir / "x.csv", "source,target\ni,a\ni,b\nj,c\ni,a\n");
  const auto x = load_crosswalk(dir / "x.csv");
  CHECK(x.pairs.size() == 3);
  CHECK(x.targets_of("i") == std::vector<std::string>{"a", "b"});
  CHECK(x.targets_of("j") == std::vector<std::string>{"c"});

  FlowMatrix f;
  f.codes = {"i", "j", "k"};
  f.counts = Eigen::MatrixXd::Zero(3, 3);
  try {
    check_coverage(x, f);
    FAIL("coverage gap not detected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Coverage);
    CHECK(std::string(e.what()).find('k') != std::string::npos);
  }
}

TEST_CASE("round trip: flows, panel, crosswalk") {
  TempDir dir;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  FlowMatrix f;
  f.codes = {"0101", "0102", "2001", "2002", "9"};
  f.counts.resize(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) f.counts(i, j) = (i == j) ? 0.0 : u(rng) / 7.0;
  f.counts(1, 3) = 0.0;
  write_flows(f, dir / "f.csv");
  const auto g = load_flows(dir / "f.csv");
  CHECK(g.codes == f.codes);
  CHECK(g.counts == f.counts);

  std::vector<PanelRecord> recs;
  for (int k = 0; k < 30; ++k)
    recs.push_back({"I" + std::to_string(k % 5), "R" + std::to_string(k / 10), 2006 + (k / 5) % 2,
                    static_cast<std::int64_t>(u(rng)), static_cast<std::int64_t>(u(rng))});
  const auto p = make_panel(recs);
  write_panel(p, dir / "p.csv");
  CHECK(load_panel(dir / "p.csv").records == p.records);

  Crosswalk x;
  x.pairs = {{"i", "a"}, {"i", "b"}, {"j, k", "c\"d"}};
  write_crosswalk(x, dir / "x.csv");
  CHECK(load_crosswalk(dir / "x.csv").pairs == x.pairs);
}
