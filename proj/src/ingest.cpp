#include "mnec/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <utility>

#include "mnec/csv.hpp"

namespace mnec {

namespace {

std::string located(const std::filesystem::path& path, std::size_t line, const std::string& msg) {
  return path.string() + ":" + std::to_string(line) + ": " + msg;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

}  // namespace

std::ptrdiff_t FlowMatrix::index_of(const std::string& code) const {
  auto it = std::find(codes.begin(), codes.end(), code);
  return it == codes.end() ? -1 : it - codes.begin();
}

std::vector<std::string> EmploymentPanel::industries() const {
  std::set<std::string> s;
  for (const auto& r : records) s.insert(r.industry);
  return {s.begin(), s.end()};
}

std::vector<std::string> EmploymentPanel::regions() const {
  std::set<std::string> s;
  for (const auto& r : records) s.insert(r.region);
  return {s.begin(), s.end()};
}

std::vector<int> EmploymentPanel::years() const {
  std::set<int> s;
  for (const auto& r : records) s.insert(r.year);
  return {s.begin(), s.end()};
}

std::vector<std::string> Crosswalk::targets_of(const std::string& source) const {
  std::vector<std::string> out;
  for (const auto& p : pairs)
    if (p.source == source) out.push_back(p.target);
  return out;
}

FlowMatrix load_flows(const std::filesystem::path& path, Warnings* warnings) {
  const auto table = csv::read(path, {"from", "to", "count"});

  FlowMatrix flows;
  flows.scheme = Scheme::Source;
  std::unordered_map<std::string, std::size_t> index;
  auto intern = [&](const std::string& code, std::size_t line) {
    if (code.empty()) throw Error(ErrorKind::Parse, located(path, line, "empty industry code"));
    auto [it, inserted] = index.try_emplace(code, flows.codes.size());
    if (inserted) flows.codes.push_back(code);
    return it->second;
  };

  struct Cell {
    std::size_t from, to;
    double count;
  };
  std::vector<Cell> cells;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    const std::size_t line = table.line_numbers[k];
    const std::size_t i = intern(row[0], line);
    const std::size_t j = intern(row[1], line);
    const double count = csv::parse_double(row[2], line, "count");
    if (count < 0.0)
      throw Error(ErrorKind::Validation, located(path, line, "negative count " + row[2]));
    if (!seen.emplace(i, j).second)
      throw Error(ErrorKind::Validation,
                  located(path, line, "duplicate pair (" + row[0] + ", " + row[1] + ")"));
    if (i == j && count != 0.0 && warnings)
      warnings->push_back(located(path, line, "self-flow for " + row[0] + " is ignored by relatedness"));
    cells.push_back({i, j, count});
  }

  const auto n = static_cast<Eigen::Index>(flows.codes.size());
  flows.counts = Eigen::MatrixXd::Zero(n, n);
  for (const auto& c : cells)
    flows.counts(static_cast<Eigen::Index>(c.from), static_cast<Eigen::Index>(c.to)) = c.count;
  return flows;
}

EmploymentPanel make_panel(std::vector<PanelRecord> records) {
  auto key = [](const PanelRecord& r) { return std::tie(r.region, r.industry, r.year); };
  std::sort(records.begin(), records.end(),
            [&](const PanelRecord& a, const PanelRecord& b) { return key(a) < key(b); });
  std::set<int> years;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    if (r.industry.empty() || r.region.empty())
      throw Error(ErrorKind::Validation, "panel record with empty industry or region");
    if (r.emp_dom < 0 || r.emp_mne < 0)
      throw Error(ErrorKind::Validation, "negative employment for (" + r.industry + ", " + r.region +
                                             ", " + std::to_string(r.year) + ")");
    if (k > 0 && key(records[k - 1]) == key(r))
      throw Error(ErrorKind::Validation, "duplicate panel key (" + r.industry + ", " + r.region + ", " +
                                             std::to_string(r.year) + ")");
    years.insert(r.year);
  }
  if (!years.empty() && *years.rbegin() - *years.begin() + 1 != static_cast<int>(years.size()))
    throw Error(ErrorKind::Validation, "panel years do not form a contiguous range");
  return EmploymentPanel{std::move(records)};
}

EmploymentPanel load_panel(const std::filesystem::path& path) {
  const auto table = csv::read(path, {"industry", "region", "year", "emp_dom", "emp_mne"});
  std::vector<PanelRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    const std::size_t line = table.line_numbers[k];
    PanelRecord r;
    r.industry = row[0];
    r.region = row[1];
    try {
      r.year = static_cast<int>(csv::parse_int(row[2], line, "year"));
      r.emp_dom = csv::parse_int(row[3], line, "emp_dom");
      r.emp_mne = csv::parse_int(row[4], line, "emp_mne");
    } catch (const Error& e) {
      throw Error(e.kind(), path.string() + ": " + e.what());
    }
    if (r.industry.empty() || r.region.empty())
      throw Error(ErrorKind::Parse, located(path, line, "empty industry or region"));
    records.push_back(std::move(r));
  }
  try {
    return make_panel(std::move(records));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

Crosswalk load_crosswalk(const std::filesystem::path& path) {
  const auto table = csv::read(path, {"source", "target"});
  Crosswalk xwalk;
  std::set<CrosswalkPair> seen;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    if (row[0].empty() || row[1].empty())
      throw Error(ErrorKind::Parse, located(path, table.line_numbers[k], "empty code"));
    CrosswalkPair pair{row[0], row[1]};
    if (seen.insert(pair).second) xwalk.pairs.push_back(std::move(pair));
  }
  return xwalk;
}

void check_coverage(const Crosswalk& xwalk, const FlowMatrix& flows) {
  std::set<std::string> covered;
  for (const auto& p : xwalk.pairs) covered.insert(p.source);
  std::string orphans;
  for (const auto& code : flows.codes) {
    if (covered.count(code)) continue;
    if (!orphans.empty()) orphans += ", ";
    orphans += code;
  }
  if (!orphans.empty())
    throw Error(ErrorKind::Coverage, "crosswalk lacks source codes: " + orphans);
}

void write_flows(const FlowMatrix& flows, const std::filesystem::path& path) {
  auto out = open_out(path);
  csv::write_row(out, {"from", "to", "count"});
  for (std::size_t i = 0; i < flows.size(); ++i)
    for (std::size_t j = 0; j < flows.size(); ++j)
      csv::write_row(out, {flows.codes[i], flows.codes[j],
                           csv::format_exact(flows.counts(static_cast<Eigen::Index>(i),
                                                          static_cast<Eigen::Index>(j)))});
}

void write_panel(const EmploymentPanel& panel, const std::filesystem::path& path) {
  auto out = open_out(path);
  csv::write_row(out, {"industry", "region", "year", "emp_dom", "emp_mne"});
  for (const auto& r : panel.records)
    csv::write_row(out, {r.industry, r.region, std::to_string(r.year), std::to_string(r.emp_dom),
                         std::to_string(r.emp_mne)});
}

void write_crosswalk(const Crosswalk& xwalk, const std::filesystem::path& path) {
  auto out = open_out(path);
  csv::write_row(out, {"source", "target"});
  for (const auto& p : xwalk.pairs) csv::write_row(out, {p.source, p.target});
}

}  // namespace mnec
