#include <doctest.h>

#include <random>

#include "mnec/panel.hpp"
#include "test_util.hpp"

using namespace mnec;

namespace {

std::uint8_t bit(Indicator i) { return static_cast<std::uint8_t>(i); }

PresenceCube random_cube(std::mt19937_64& rng, std::size_t n_ind, std::size_t n_reg, int y0, int y1) {
  std::vector<std::string> inds, regs;
  for (std::size_t j = 0; j < n_ind; ++j) inds.push_back((j < 10 ? "1" : "2") + std::to_string(100 + j));
  for (std::size_t r = 0; r < n_reg; ++r) regs.push_back("R" + std::to_string(r));
  std::sort(inds.begin(), inds.end());
  PresenceCube cube(inds, regs, y0, y1, 5);
  std::uniform_int_distribution<int> pick(0, 3);
  const std::int64_t levels[] = {0, 3, 5, 40};
  for (std::size_t j = 0; j < n_ind; ++j)
    for (std::size_t r = 0; r < n_reg; ++r)
      for (int y = y0; y <= y1; ++y) cube.set_employment(j, r, y, levels[pick(rng)], levels[pick(rng)]);
  return cube;
}

}  // namespace

TEST_CASE("classify: definition examples") {
  const auto a = classify(6, 0, 5);
  CHECK((a & bit(Indicator::Domestic)));
  CHECK((a & bit(Indicator::ExclDomestic)));
  CHECK_FALSE((a & bit(Indicator::Overlap)));
  CHECK_FALSE((a & bit(Indicator::Mne)));

  CHECK(classify(5, 5, 5) == 0);

  const auto gap = classify(6, 3, 5);
  CHECK(gap == bit(Indicator::Domestic));

  CHECK(classify(0, 6, 5) == (bit(Indicator::Mne) | bit(Indicator::ExclMne)));
  CHECK(classify(3, 6, 5) == bit(Indicator::Mne));
  CHECK(classify(6, 6, 5) == (bit(Indicator::Domestic) | bit(Indicator::Mne) | bit(Indicator::Overlap)));
  CHECK(classify(0, 0, 5) == 0);
}

TEST_CASE("classify: partition and threshold monotonicity over a grid") {
  for (int d = 0; d <= 12; ++d)
    for (int m = 0; m <= 12; ++m)
      for (int t = 0; t <= 10; ++t) {
        const auto f = classify(d, m, t);
        const int excl = !!(f & bit(Indicator::ExclDomestic)) + !!(f & bit(Indicator::ExclMne)) +
                         !!(f & bit(Indicator::Overlap));
        CHECK(excl <= 1);
        const auto g = classify(d, m, t + 1);
        CHECK((g & ~f) == 0);
      }
}

TEST_CASE("build_presence fills absent cells with zero") {
  const auto panel = make_panel({{"B", "R1", 2006, 10, 0}, {"A", "R2", 2007, 0, 9}});
  const auto cube = build_presence(panel);
  CHECK(cube.industries() == std::vector<std::string>{"A", "B"});
  CHECK(cube.first_year() == 2006);
  CHECK(cube.last_year() == 2007);
  CHECK(cube.has(Indicator::ExclDomestic, 1, 0, 2006));
  CHECK(cube.has(Indicator::ExclMne, 0, 1, 2007));
  CHECK(cube.emp_dom(0, 0, 2006) == 0);
  CHECK_FALSE(cube.has(Indicator::Domestic, 1, 0, 2007));
  CHECK_THROWS_AS(build_presence(EmploymentPanel{}), Error);
}

TEST_CASE("periods: parsing and validation") {
  const auto p = parse_period("2006-2009");
  CHECK(p.name == "2006-2009");
  CHECK(p.base_year == 2006);
  CHECK(p.end_year == 2009);
  const auto q = parse_period("late:2015:2019");
  CHECK(q.name == "late");
  CHECK(q.base_year == 2015);
  CHECK_THROWS_AS(parse_period("2006"), Error);
  CHECK_THROWS_AS(parse_period("x:2006:abc"), Error);
  CHECK(default_periods().size() == 3);
  CHECK_NOTHROW(validate_periods(default_periods()));
  CHECK_THROWS_AS(validate_periods({parse_period("2009-2006")}), Error);
  CHECK_THROWS_AS(validate_periods({parse_period("2006-2010"), parse_period("2010-2014")}), Error);
  CHECK_THROWS_AS(validate_periods({parse_period("2010-2014"), parse_period("2006-2009")}), Error);
}

TEST_CASE("transitions: entry and persistence examples") {
  PresenceCube cube({"A", "B", "C"}, {"R"}, 2006, 2007, 5);
  cube.set_employment(0, 0, 2007, 10, 0);   // entry
  cube.set_employment(1, 0, 2006, 10, 0);   // persistence
  cube.set_employment(1, 0, 2007, 10, 0);
  cube.set_employment(2, 0, 2006, 10, 0);   // exit
  const auto t = label_transitions(cube, {parse_period("2006-2007")});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].entry);
  CHECK(t.rows[0].in_entry_sample);
  CHECK_FALSE(t.rows[0].in_exit_sample);
  CHECK_FALSE(t.rows[1].entry);
  CHECK_FALSE(t.rows[1].exit);
  CHECK(t.rows[1].in_exit_sample);
  CHECK(t.rows[2].exit);
  CHECK_THROWS_AS(label_transitions(cube, {parse_period("2006-2008")}), Error);
}

TEST_CASE("transitions: brute-force counts on 10 x 2 x 2 cubes") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cube = random_cube(rng, 10, 2, 2006, 2007);
    const auto t = label_transitions(cube, {parse_period("2006-2007")});
    long entries = 0, exits = 0, entry_sample = 0, exit_sample = 0;
    for (std::size_t j = 0; j < 10; ++j)
      for (std::size_t r = 0; r < 2; ++r) {
        const bool b = cube.emp_dom(j, r, 2006) > 5;
        const bool e = cube.emp_dom(j, r, 2007) > 5;
        entries += !b && e;
        exits += b && !e;
        entry_sample += !b;
        exit_sample += b;
      }
    long got_entries = 0, got_exits = 0, got_es = 0, got_xs = 0;
    for (const auto& row : t.rows) {
      got_entries += row.entry;
      got_exits += row.exit;
      got_es += row.in_entry_sample;
      got_xs += row.in_exit_sample;
      CHECK_FALSE((row.entry && row.exit));
      CHECK(row.in_entry_sample != row.in_exit_sample);
    }
    CHECK(got_entries == entries);
    CHECK(got_exits == exits);
    CHECK(got_es == entry_sample);
    CHECK(got_xs == exit_sample);
  }
}

TEST_CASE("transitions: row order is period, region, industry") {
  std::mt19937_64 rng(1);
  const auto cube = random_cube(rng, 4, 3, 2006, 2009);
  const auto t = label_transitions(cube, {parse_period("2006-2007"), parse_period("2008-2009")});
  REQUIRE(t.rows.size() == 24);
  std::size_t k = 0;
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t j = 0; j < 4; ++j, ++k) {
        CHECK(t.rows[k].period == p);
        CHECK(t.rows[k].region == r);
        CHECK(t.rows[k].industry == j);
      }
}

TEST_CASE("curve: anchor year is 1 and a static economy is flat") {
  std::mt19937_64 rng(4);
  const auto cube = random_cube(rng, 8, 3, 2006, 2010);
  for (int anchor = 2006; anchor <= 2010; ++anchor) {
    const auto c = structural_change_curve(cube, anchor, CurveDirection::Forward);
    REQUIRE(c.size() == 5);
    if (c[anchor - 2006].share) CHECK(*c[anchor - 2006].share == 1.0);
  }
  PresenceCube flat({"A", "B"}, {"R"}, 2000, 2003, 5);
  for (int y = 2000; y <= 2003; ++y) flat.set_employment(0, 0, y, 9, 0);
  for (auto dir : {CurveDirection::Forward, CurveDirection::Backward})
    for (const auto& p : structural_change_curve(flat, 2000, dir)) CHECK(p.share == 1.0);
  CHECK_THROWS_AS(structural_change_curve(flat, 1999, CurveDirection::Forward), Error);
}

TEST_CASE("curve: 5 industries, 3 years, one exit, hand count") {
  // Industries A-D present throughout in region R; E present in 2006 and
  // 2007 and gone in 2008.
  PresenceCube cube({"A", "B", "C", "D", "E"}, {"R"}, 2006, 2008, 5);
  for (std::size_t j = 0; j < 4; ++j)
    for (int y = 2006; y <= 2008; ++y) cube.set_employment(j, 0, y, 20, 0);
  cube.set_employment(4, 0, 2006, 20, 0);
  cube.set_employment(4, 0, 2007, 20, 0);

  const auto fwd = structural_change_curve(cube, 2006, CurveDirection::Forward);
  CHECK(*fwd[0].share == 1.0);  // 5/5
  CHECK(*fwd[1].share == 1.0);  // 5/5
  CHECK(*fwd[2].share == 1.0);  // 4/4
  const auto fwd08 = structural_change_curve(cube, 2008, CurveDirection::Forward);
  CHECK(*fwd08[0].share == 0.8);  // 4/5
  CHECK(*fwd08[1].share == 0.8);
  CHECK(*fwd08[2].share == 1.0);
  const auto bwd = structural_change_curve(cube, 2006, CurveDirection::Backward);
  CHECK(*bwd[0].share == 0.8);
  CHECK(*bwd[2].share == 1.0);

  PresenceCube empty({"A"}, {"R"}, 2006, 2007, 5);
  empty.set_employment(0, 0, 2007, 9, 0);
  const auto gap = structural_change_curve(empty, 2007, CurveDirection::Forward);
  CHECK_FALSE(gap[0].share.has_value());
}

TEST_CASE("entry counts: empty, single, and scripted totals") {
  PresenceCube cube({"1010", "1020", "2010"}, {"R1", "R2"}, 2015, 2017, 5);
  const std::vector<PeriodSpec> periods{parse_period("2015-2016"), parse_period("2016-2017")};
  auto t = label_transitions(cube, periods);
  for (auto g : {EntryGrouping::Year, EntryGrouping::Region, EntryGrouping::SectorPrefix})
    for (const auto& [k, v] : entry_counts(t, cube, EntryFilter::All, g)) CHECK(v == 0);

  cube.set_employment(2, 1, 2016, 0, 50);
  cube.set_employment(2, 1, 2017, 10, 50);
  t = label_transitions(cube, periods);
  const auto by_year = entry_counts(t, cube, EntryFilter::IntoExclusiveMne, EntryGrouping::Year);
  CHECK(by_year.at("2017") == 1);
  CHECK(by_year.at("2016") == 0);
  const auto by_sector = entry_counts(t, cube, EntryFilter::IntoExclusiveMne, EntryGrouping::SectorPrefix);
  CHECK(by_sector.at("20") == 1);
  CHECK(by_sector.at("10") == 0);
}

TEST_CASE("entry counts: 20 scripted entries are conserved across groupings") {
  std::vector<std::string> inds;
  for (int j = 0; j < 10; ++j) inds.push_back(std::to_string(10 + j % 4) + std::to_string(10 + j));
  std::sort(inds.begin(), inds.end());
  PresenceCube cube(inds, {"R1", "R2", "R3"}, 2010, 2013, 5);
  std::mt19937_64 rng(20);
  // 20 distinct (industry, region, period) slots, each an entry into an
  // exclusive-MNE cell; everything else stays at zero.
  std::vector<std::tuple<std::size_t, std::size_t, int>> slots;
  for (std::size_t j = 0; j < 10; ++j)
    for (std::size_t r = 0; r < 3; ++r)
      for (int p = 0; p < 2; ++p) slots.emplace_back(j, r, p);
  std::shuffle(slots.begin(), slots.end(), rng);
  int scripted = 0;
  for (const auto& [j, r, p] : slots) {
    if (scripted == 20) break;
    const int base = 2010 + 2 * p;
    if (cube.emp_dom(j, r, base) > 5 || cube.emp_mne(j, r, base) > 0) continue;
    cube.set_employment(j, r, base, 0, 30);
    cube.set_employment(j, r, base + 1, 30, 30);
    ++scripted;
  }
  REQUIRE(scripted == 20);
  const auto t = label_transitions(cube, {parse_period("2010-2011"), parse_period("2012-2013")});
  for (auto g : {EntryGrouping::Year, EntryGrouping::Region, EntryGrouping::SectorPrefix}) {
    long total = 0;
    for (const auto& [k, v] : entry_counts(t, cube, EntryFilter::IntoExclusiveMne, g)) total += v;
    CHECK(total == 20);
  }
}

TEST_CASE("writers produce headers and NA markers") {
  testutil::TempDir dir;
  write_curve({{2006, 1.0}, {2007, std::nullopt}}, dir / "c.csv");
  const auto text = testutil::read_file(dir / "c.csv");
  CHECK(text.find("2007,NA") != std::string::npos);
  write_counts({{"a", 1}, {"b", 2}}, "region", dir / "n.csv");
  CHECK(testutil::read_file(dir / "n.csv").rfind("region,", 0) == 0);
}
