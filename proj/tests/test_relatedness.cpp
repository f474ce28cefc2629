#include <doctest.h>

#include <random>

#include "mnec/csv.hpp"
#include "mnec/relatedness.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mnec;

namespace {

FlowMatrix make_flows(const oracle::Dense& m) {
  FlowMatrix f;
  for (std::size_t i = 0; i < m.size(); ++i) f.codes.push_back("I" + std::to_string(i));
  f.counts.resize(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) f.counts(i, j) = m[i][j];
  return f;
}

oracle::Dense random_flows(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  oracle::Dense m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && u(rng) < 0.6) m[i][j] = std::floor(u(rng) * 50.0);
  m[0][1] += 1.0;
  return m;
}

}  // namespace

TEST_CASE("null-model fixed point drops the edge") {
  // Row and column sums are all 4 of 16, so a flow of 1 is exactly expected.
  const auto f = make_flows({{0, 3, 1, 0}, {3, 0, 0, 1}, {1, 0, 0, 3}, {0, 1, 3, 0}});
  const auto sr = mobility_ratio(f);
  CHECK(sr(0, 2) == 1.0);
  CHECK(sr(2, 0) == 1.0);
  const auto net = build_relatedness(f);
  CHECK(net.weight(0, 2) == 0.0);
  CHECK(net.neighbors(0).size() == 1);
}

TEST_CASE("S = 3 maps to weight 0.5") {
  // SR~(0,1) = (3/4) / (4/16).
  const auto f = make_flows({{0, 3, 1, 0}, {3, 0, 0, 1}, {1, 0, 0, 3}, {0, 1, 3, 0}});
  const auto sr = mobility_ratio(f);
  CHECK(sr(0, 1) == doctest::Approx(3.0).epsilon(1e-15));
  const auto net = build_relatedness(f);
  CHECK(net.weight(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(net.weight(2, 3) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(net.weight(0, 2) == 0.0);
}

TEST_CASE("asymmetric 4-industry matrix against frozen exact values") {
  // Exact rational weights from a fraction-arithmetic evaluation of the
  // three formulas: only pairs (0,1) and (2,3) are positive.
  const oracle::Dense m{{0, 10, 2, 1}, {6, 0, 3, 0}, {1, 1, 0, 8}, {2, 0, 9, 0}};
  const auto net = build_relatedness(make_flows(m));
  CHECK(net.edge_count() == 2);
  CHECK(net.weight(0, 1) == doctest::Approx(8093.0 / 15815.0).epsilon(1e-14));
  CHECK(net.weight(2, 3) == doctest::Approx(30043.0 / 57763.0).epsilon(1e-14));
  CHECK(net.weight(0, 2) == 0.0);
  CHECK(net.weight(0, 3) == 0.0);
  CHECK(net.weight(1, 2) == 0.0);
  CHECK(net.weight(1, 3) == 0.0);

  const auto ref = oracle::relatedness(m);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(net.weight(i, j) == doctest::Approx(ref[i][j]).epsilon(1e-14));
}

TEST_CASE("diagonal flows are ignored") {
  oracle::Dense m{{0, 10, 2, 1}, {6, 0, 3, 0}, {1, 1, 0, 8}, {2, 0, 9, 0}};
  const auto a = build_relatedness(make_flows(m)).dense();
  m[0][0] = 100;
  m[2][2] = 7;
  CHECK(build_relatedness(make_flows(m)).dense() == a);
}

TEST_CASE("degenerate inputs") {
  CHECK_THROWS_AS(build_relatedness(make_flows({{3}})), Error);
  CHECK_THROWS_AS(build_relatedness(make_flows({{5, 0}, {0, 5}})), Error);
}

TEST_CASE("property: symmetry, range, zero diagonal, scale invariance, oracle agreement") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> scale(0.01, 1000.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + trial % 10;
    const auto m = random_flows(rng, n);
    const auto net = build_relatedness(make_flows(m));
    const auto a = net.dense();
    const auto ref = oracle::relatedness(m);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(a(i, i) == 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(a(i, j) == a(j, i));
        CHECK(a(i, j) == doctest::Approx(ref[i][j]).epsilon(1e-12));
      }
      for (const auto& e : net.neighbors(i)) {
        CHECK(e.weight > 0.0);
        CHECK(e.weight < 1.0);
      }
    }
    const double c = scale(rng);
    auto scaled = make_flows(m);
    scaled.counts *= c;
    const auto b = build_relatedness(scaled).dense();
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("crosswalk: duplicated values on one-to-many split") {
  FlowMatrix f;
  f.codes = {"i", "j"};
  f.counts.resize(2, 2);
  f.counts << 0, 7.5, 0, 0;
  Crosswalk x;
  x.pairs = {{"i", "a"}, {"i", "b"}, {"j", "c"}};
  const auto g = convert_scheme(f, x);
  CHECK(g.scheme == Scheme::Target);
  CHECK(g.counts(g.index_of("a"), g.index_of("c")) == 7.5);
  CHECK(g.counts(g.index_of("b"), g.index_of("c")) == 7.5);
  CHECK(g.counts.sum() == 15.0);
}

TEST_CASE("crosswalk: identity is the identity map") {
  std::mt19937_64 rng(3);
  const auto m = random_flows(rng, 6);
  const auto f = make_flows(m);
  Crosswalk x;
  for (const auto& c : f.codes) x.pairs.push_back({c, c});
  const auto g = convert_scheme(f, x);
  CHECK(g.codes == f.codes);
  CHECK(g.counts == f.counts);
}

TEST_CASE("crosswalk: collapse onto the diagonal, collisions keep the maximum, coverage") {
  FlowMatrix f;
  f.codes = {"i", "j", "k"};
  f.counts.resize(3, 3);
  f.counts << 0, 4, 9, 0, 0, 2, 0, 0, 0;
  Crosswalk x;
  x.pairs = {{"i", "a"}, {"j", "a"}, {"k", "c"}};
  const auto g = convert_scheme(f, x);
  CHECK(g.counts(g.index_of("a"), g.index_of("a")) == 4.0);
  CHECK(g.counts(g.index_of("a"), g.index_of("c")) == 9.0);
  x.pairs.pop_back();
  CHECK_THROWS_AS(convert_scheme(f, x), Error);
}

TEST_CASE("node attributes and network export") {
  const auto net = RelatednessNetwork::from_dense(
      {"A", "B", "C"}, (Eigen::MatrixXd(3, 3) << 0, 0.25, 0, 0.25, 0, 0.5, 0, 0.5, 0).finished());
  const auto panel = make_panel({{"A", "R1", 2010, 0, 30}, {"A", "R2", 2010, 0, 20},
                                 {"B", "R1", 2010, 30, 10}, {"B", "R1", 2011, 1, 1}});
  const auto attrs = node_attributes(net, panel, 2010);
  CHECK(attrs[0].mne_share == 1.0);
  CHECK_FALSE(attrs[0].no_employment);
  CHECK(attrs[1].mne_share == 0.25);
  CHECK(attrs[2].mne_share == 0.0);
  CHECK(attrs[2].no_employment);
  CHECK_THROWS_AS(node_attributes(net, panel, 1999), Error);

  testutil::TempDir dir;
  export_network(net, panel, 2010, dir / "edges.csv", dir / "nodes.csv");
  CHECK(testutil::read_file(dir / "edges.csv") == "from,to,weight\nA,B,0.25\nB,C,0.5\n");
  const auto nodes = testutil::read_file(dir / "nodes.csv");
  CHECK(nodes.find("C,0,1") != std::string::npos);
}
