#include "mnec/cohesion.hpp"

#include <algorithm>
#include <fstream>

#include "mnec/csv.hpp"

namespace mnec {

const char* to_string(Partition p) {
  switch (p) {
    case Partition::All: return "all";
    case Partition::ExclDomestic: return "excl_d";
    case Partition::ExclMne: return "excl_m";
    case Partition::Overlap: return "overlap";
  }
  return "unknown";
}

namespace {

bool in_partition(const PresenceCube& cube, std::size_t j, std::size_t r, int year, Partition partition) {
  switch (partition) {
    case Partition::All:
      return cube.has(Indicator::Domestic, j, r, year) || cube.has(Indicator::Mne, j, r, year);
    case Partition::ExclDomestic: return cube.has(Indicator::ExclDomestic, j, r, year);
    case Partition::ExclMne: return cube.has(Indicator::ExclMne, j, r, year);
    case Partition::Overlap: return cube.has(Indicator::Overlap, j, r, year);
  }
  return false;
}

std::vector<std::ptrdiff_t> network_to_cube(const RelatednessNetwork& net, const PresenceCube& cube) {
  std::vector<std::ptrdiff_t> map(net.size(), -1);
  const auto& axis = cube.industries();
  for (std::size_t i = 0; i < net.size(); ++i) {
    auto it = std::lower_bound(axis.begin(), axis.end(), net.codes()[i]);
    if (it != axis.end() && *it == net.codes()[i]) map[i] = it - axis.begin();
  }
  return map;
}

std::vector<std::uint8_t> presence_from_map(const std::vector<std::ptrdiff_t>& map, const PresenceCube& cube,
                                            std::size_t region, int year, Partition partition) {
  std::vector<std::uint8_t> x(map.size(), 0);
  for (std::size_t i = 0; i < map.size(); ++i)
    if (map[i] >= 0 && in_partition(cube, static_cast<std::size_t>(map[i]), region, year, partition)) x[i] = 1;
  return x;
}

}  // namespace

std::vector<std::uint8_t> presence_vector(const RelatednessNetwork& net, const PresenceCube& cube,
                                          std::size_t region, int year, Partition partition) {
  return presence_from_map(network_to_cube(net, cube), cube, region, year, partition);
}

std::vector<double> weighted_closeness(const RelatednessNetwork& net, std::span<const std::uint8_t> present) {
  if (present.size() != net.size()) throw Error(ErrorKind::Validation, "presence vector size mismatch");
  std::vector<double> wc(net.size(), 0.0);
  for (std::size_t i = 0; i < net.size(); ++i) {
    double sum = 0.0;
    for (const auto& e : net.neighbors(i))
      if (present[e.to]) sum += e.weight;
    wc[i] = sum;
  }
  return wc;
}

std::vector<double> strategic_closeness(const RelatednessNetwork& net, std::span<const std::uint8_t> present,
                                        int steps, Warnings* warnings) {
  if (present.size() != net.size()) throw Error(ErrorKind::Validation, "presence vector size mismatch");
  if (steps < 0) throw Error(ErrorKind::Validation, "walk length must be non-negative");
  const std::size_t n = net.size();

  std::size_t starts = 0;
  std::size_t stranded = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!present[i]) continue;
    if (net.degree(i) > 0.0)
      ++starts;
    else
      ++stranded;
  }
  std::vector<double> p(n, 0.0);
  if (starts == 0) {
    if (warnings)
      warnings->push_back(stranded == 0 ? "empty present set: strategic closeness is zero"
                                        : "no present industry has a positive degree: strategic closeness is zero");
    return p;
  }
  if (stranded > 0 && warnings)
    warnings->push_back(std::to_string(stranded) +
                        " present industr(ies) with zero degree left out of the walker's start distribution");

  const double mass = 1.0 / static_cast<double>(starts);
  for (std::size_t i = 0; i < n; ++i)
    if (present[i] && net.degree(i) > 0.0) p[i] = mass;

  std::vector<double> next(n);
  for (int step = 0; step < steps; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      if (p[s] == 0.0) continue;
      // Mass only ever sits on nodes with positive degree.
      const double out = p[s] / net.degree(s);
      for (const auto& e : net.neighbors(s)) next[e.to] += out * e.weight;
    }
    p.swap(next);
  }
  return p;
}

CohesionTable cohesion_panel(const RelatednessNetwork& net, const PresenceCube& cube,
                             const std::vector<PeriodSpec>& periods, int steps) {
  CohesionTable table;
  table.periods = periods;
  const auto map = network_to_cube(net, cube);

  // cube industry -> network index
  std::vector<std::ptrdiff_t> inverse(cube.n_industries(), -1);
  for (std::size_t i = 0; i < map.size(); ++i)
    if (map[i] >= 0) inverse[static_cast<std::size_t>(map[i])] = static_cast<std::ptrdiff_t>(i);
  std::size_t missing = 0;
  for (auto v : inverse) missing += v < 0;
  if (missing > 0)
    table.warnings.push_back(std::to_string(missing) +
                             " panel industr(ies) are not in the relatedness network and score zero");

  table.rows.reserve(periods.size() * cube.n_regions() * cube.n_industries());
  for (std::size_t p = 0; p < periods.size(); ++p) {
    const int base = periods[p].base_year;
    if (!cube.has_year(base))
      throw Error(ErrorKind::Validation, "base year " + std::to_string(base) + " is not in the panel");
    for (std::size_t r = 0; r < cube.n_regions(); ++r) {
      std::array<std::vector<double>, 4> wc;
      std::array<std::vector<double>, 4> sc;
      for (auto part : kPartitions) {
        const auto k = static_cast<std::size_t>(part);
        const auto x = presence_from_map(map, cube, r, base, part);
        Warnings local;
        wc[k] = weighted_closeness(net, x);
        sc[k] = strategic_closeness(net, x, steps, &local);
        for (auto& w : local)
          table.warnings.push_back(periods[p].name + "/" + cube.regions()[r] + "/" + to_string(part) + ": " + w);
      }
      for (std::size_t j = 0; j < cube.n_industries(); ++j) {
        CohesionRow row;
        row.industry = j;
        row.region = r;
        row.period = p;
        if (inverse[j] >= 0) {
          const auto i = static_cast<std::size_t>(inverse[j]);
          for (std::size_t k = 0; k < 4; ++k) {
            row.wc[k] = wc[k][i];
            row.sc[k] = sc[k][i];
          }
        }
        table.rows.push_back(row);
      }
    }
  }
  return table;
}

void write_cohesion(const CohesionTable& table, const PresenceCube& cube, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  csv::write_row(out, {"industry", "region", "period", "wc_all", "sc_all", "wc_excl_d", "wc_excl_m", "wc_overlap",
                       "sc_excl_d", "sc_excl_m", "sc_overlap"});
  auto f = [](double v) { return csv::format_sig(v, 12); };
  for (const auto& row : table.rows)
    csv::write_row(out, {cube.industries()[row.industry], cube.regions()[row.region],
                         table.periods[row.period].name, f(row.wc[0]), f(row.sc[0]), f(row.wc[1]), f(row.wc[2]),
                         f(row.wc[3]), f(row.sc[1]), f(row.sc[2]), f(row.sc[3])});
}

}  // namespace mnec
