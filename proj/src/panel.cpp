#include "mnec/panel.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "mnec/csv.hpp"

namespace mnec {

namespace {

std::size_t position(const std::vector<std::string>& sorted, const std::string& key) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), key);
  return static_cast<std::size_t>(it - sorted.begin());
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

}  // namespace

std::uint8_t classify(std::int64_t emp_dom, std::int64_t emp_mne, int threshold) {
  const bool dom = emp_dom > threshold;
  const bool mne = emp_mne > threshold;
  std::uint8_t bits = 0;
  if (dom) bits |= static_cast<std::uint8_t>(Indicator::Domestic);
  if (mne) bits |= static_cast<std::uint8_t>(Indicator::Mne);
  if (dom && emp_mne == 0) bits |= static_cast<std::uint8_t>(Indicator::ExclDomestic);
  if (mne && emp_dom == 0) bits |= static_cast<std::uint8_t>(Indicator::ExclMne);
  if (dom && mne) bits |= static_cast<std::uint8_t>(Indicator::Overlap);
  return bits;
}

PresenceCube::PresenceCube(std::vector<std::string> industries, std::vector<std::string> regions,
                           int first_year, int last_year, int threshold)
    : industries_(std::move(industries)),
      regions_(std::move(regions)),
      first_year_(first_year),
      last_year_(last_year),
      threshold_(threshold) {
  if (last_year_ < first_year_) throw Error(ErrorKind::Validation, "cube year range is empty");
  if (!std::is_sorted(industries_.begin(), industries_.end()) ||
      !std::is_sorted(regions_.begin(), regions_.end()))
    throw Error(ErrorKind::Validation, "cube axes must be sorted");
  const std::size_t cells = industries_.size() * regions_.size() * n_years();
  flags_.assign(cells, classify(0, 0, threshold_));
  emp_dom_.assign(cells, 0);
  emp_mne_.assign(cells, 0);
}

void PresenceCube::set_employment(std::size_t industry, std::size_t region, int year, std::int64_t dom,
                                  std::int64_t mne) {
  const auto c = cell(industry, region, year);
  emp_dom_[c] = dom;
  emp_mne_[c] = mne;
  flags_[c] = classify(dom, mne, threshold_);
}

PresenceCube build_presence(const EmploymentPanel& panel, int threshold) {
  if (panel.records.empty()) throw Error(ErrorKind::Validation, "cannot build presence from an empty panel");
  if (threshold < 0) throw Error(ErrorKind::Validation, "threshold must be non-negative");
  const auto years = panel.years();
  PresenceCube cube(panel.industries(), panel.regions(), years.front(), years.back(), threshold);
  for (const auto& r : panel.records)
    cube.set_employment(position(cube.industries(), r.industry), position(cube.regions(), r.region), r.year,
                        r.emp_dom, r.emp_mne);
  return cube;
}

PeriodSpec parse_period(const std::string& text) {
  auto bad = [&] { return Error(ErrorKind::Validation, "invalid period '" + text + "'"); };
  PeriodSpec p;
  std::string years = text;
  char sep = '-';
  if (auto colon = text.find(':'); colon != std::string::npos) {
    p.name = text.substr(0, colon);
    years = text.substr(colon + 1);
    sep = ':';
  }
  const auto cut = years.find(sep);
  if (cut == std::string::npos) throw bad();
  try {
    p.base_year = static_cast<int>(csv::parse_int(years.substr(0, cut), 0, "year"));
    p.end_year = static_cast<int>(csv::parse_int(years.substr(cut + 1), 0, "year"));
  } catch (const Error&) {
    throw bad();
  }
  if (p.name.empty()) p.name = std::to_string(p.base_year) + "-" + std::to_string(p.end_year);
  if (p.base_year >= p.end_year) throw bad();
  return p;
}

std::vector<PeriodSpec> default_periods() {
  return {{"2006-2009", 2006, 2009}, {"2010-2014", 2010, 2014}, {"2015-2019", 2015, 2019}};
}

void validate_periods(const std::vector<PeriodSpec>& periods) {
  if (periods.empty()) throw Error(ErrorKind::Validation, "no periods defined");
  std::set<std::string> names;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    const auto& p = periods[k];
    if (p.base_year >= p.end_year)
      throw Error(ErrorKind::Validation, "period " + p.name + " must have base year before end year");
    if (k > 0 && periods[k - 1].end_year >= p.base_year)
      throw Error(ErrorKind::Validation, "periods " + periods[k - 1].name + " and " + p.name +
                                             " overlap or are out of order");
    if (!names.insert(p.name).second) throw Error(ErrorKind::Validation, "duplicate period name " + p.name);
  }
}

TransitionTable label_transitions(const PresenceCube& cube, const std::vector<PeriodSpec>& periods) {
  TransitionTable table;
  table.periods = periods;
  for (const auto& p : periods) {
    if (!cube.has_year(p.base_year) || !cube.has_year(p.end_year))
      throw Error(ErrorKind::Validation, "period " + p.name + " needs years " + std::to_string(p.base_year) +
                                             " and " + std::to_string(p.end_year) + " in the panel");
  }
  table.rows.reserve(periods.size() * cube.n_regions() * cube.n_industries());
  for (std::size_t p = 0; p < periods.size(); ++p)
    for (std::size_t r = 0; r < cube.n_regions(); ++r)
      for (std::size_t j = 0; j < cube.n_industries(); ++j) {
        const bool at_base = cube.has(Indicator::Domestic, j, r, periods[p].base_year);
        const bool at_end = cube.has(Indicator::Domestic, j, r, periods[p].end_year);
        TransitionRow row;
        row.industry = j;
        row.region = r;
        row.period = p;
        row.entry = !at_base && at_end;
        row.exit = at_base && !at_end;
        row.in_entry_sample = !at_base;
        row.in_exit_sample = at_base;
        table.rows.push_back(row);
      }
  return table;
}

std::vector<CurvePoint> structural_change_curve(const PresenceCube& cube, int anchor_year,
                                                CurveDirection direction) {
  if (!cube.has_year(anchor_year))
    throw Error(ErrorKind::Validation, "anchor year " + std::to_string(anchor_year) + " is not in the panel");
  const int reference = direction == CurveDirection::Forward ? anchor_year : cube.last_year();
  std::vector<CurvePoint> curve;
  for (int t = cube.first_year(); t <= cube.last_year(); ++t) {
    long present = 0;
    long kept = 0;
    for (std::size_t r = 0; r < cube.n_regions(); ++r)
      for (std::size_t j = 0; j < cube.n_industries(); ++j) {
        if (!cube.has(Indicator::Domestic, j, r, t)) continue;
        ++present;
        if (cube.has(Indicator::Domestic, j, r, reference)) ++kept;
      }
    CurvePoint point{t, std::nullopt};
    if (present > 0) point.share = static_cast<double>(kept) / static_cast<double>(present);
    curve.push_back(point);
  }
  return curve;
}

std::map<std::string, long> entry_counts(const TransitionTable& table, const PresenceCube& cube,
                                         EntryFilter filter, EntryGrouping group_by) {
  std::map<std::string, long> counts;
  auto prefix = [](const std::string& code) { return code.substr(0, std::min<std::size_t>(2, code.size())); };
  switch (group_by) {
    case EntryGrouping::Year:
      for (const auto& p : table.periods) counts[std::to_string(p.end_year)] = 0;
      break;
    case EntryGrouping::Region:
      for (const auto& r : cube.regions()) counts[r] = 0;
      break;
    case EntryGrouping::SectorPrefix:
      for (const auto& j : cube.industries()) counts[prefix(j)] = 0;
      break;
  }
  for (const auto& row : table.rows) {
    if (!row.entry) continue;
    const auto& period = table.periods[row.period];
    if (filter == EntryFilter::IntoExclusiveMne &&
        !cube.has(Indicator::ExclMne, row.industry, row.region, period.base_year))
      continue;
    switch (group_by) {
      case EntryGrouping::Year: ++counts[std::to_string(period.end_year)]; break;
      case EntryGrouping::Region: ++counts[cube.regions()[row.region]]; break;
      case EntryGrouping::SectorPrefix: ++counts[prefix(cube.industries()[row.industry])]; break;
    }
  }
  return counts;
}

void write_transitions(const TransitionTable& table, const PresenceCube& cube,
                       const std::filesystem::path& path) {
  auto out = open_out(path);
  csv::write_row(out, {"industry", "region", "period", "entry", "exit", "in_entry_sample", "in_exit_sample"});
  auto flag = [](bool b) { return std::string(b ? "1" : "0"); };
  for (const auto& row : table.rows)
    csv::write_row(out, {cube.industries()[row.industry], cube.regions()[row.region],
                         table.periods[row.period].name, flag(row.entry), flag(row.exit),
                         flag(row.in_entry_sample), flag(row.in_exit_sample)});
}

void write_curve(const std::vector<CurvePoint>& curve, const std::filesystem::path& path) {
  auto out = open_out(path);
  csv::write_row(out, {"year", "share"});
  for (const auto& p : curve)
    csv::write_row(out, {std::to_string(p.year), p.share ? csv::format_sig(*p.share, 12) : "NA"});
}

void write_counts(const std::map<std::string, long>& counts, const std::string& key_name,
                  const std::filesystem::path& path) {
  auto out = open_out(path);
  csv::write_row(out, {key_name, "entries"});
  for (const auto& [key, n] : counts) csv::write_row(out, {key, std::to_string(n)});
}

}  // namespace mnec
