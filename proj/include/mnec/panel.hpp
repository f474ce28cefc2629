#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mnec/ingest.hpp"

namespace mnec {

enum class Indicator : std::uint8_t {
  Domestic = 1u << 0,       // X_D
  Mne = 1u << 1,            // X_M
  ExclDomestic = 1u << 2,   // X_exclD
  ExclMne = 1u << 3,        // X_exclM
  Overlap = 1u << 4,        // X_overlap
};

/// Presence indicators on the full (industry x region x year) grid. Axes are
/// sorted; years are contiguous. Cells missing from the panel hold zero
/// employment.
class PresenceCube {
 public:
  PresenceCube(std::vector<std::string> industries, std::vector<std::string> regions, int first_year,
               int last_year, int threshold);

  const std::vector<std::string>& industries() const { return industries_; }
  const std::vector<std::string>& regions() const { return regions_; }
  int first_year() const { return first_year_; }
  int last_year() const { return last_year_; }
  int threshold() const { return threshold_; }
  bool has_year(int year) const { return year >= first_year_ && year <= last_year_; }
  std::size_t n_industries() const { return industries_.size(); }
  std::size_t n_regions() const { return regions_.size(); }
  std::size_t n_years() const { return static_cast<std::size_t>(last_year_ - first_year_ + 1); }

  bool has(Indicator ind, std::size_t industry, std::size_t region, int year) const {
    return (flags_[cell(industry, region, year)] & static_cast<std::uint8_t>(ind)) != 0;
  }
  std::int64_t emp_dom(std::size_t industry, std::size_t region, int year) const {
    return emp_dom_[cell(industry, region, year)];
  }
  std::int64_t emp_mne(std::size_t industry, std::size_t region, int year) const {
    return emp_mne_[cell(industry, region, year)];
  }

  /// Sets employment and recomputes the cell's indicators.
  void set_employment(std::size_t industry, std::size_t region, int year, std::int64_t dom, std::int64_t mne);

 private:
  std::size_t cell(std::size_t industry, std::size_t region, int year) const {
    return (region * industries_.size() + industry) * n_years() + static_cast<std::size_t>(year - first_year_);
  }

  std::vector<std::string> industries_;
  std::vector<std::string> regions_;
  int first_year_;
  int last_year_;
  int threshold_;
  std::vector<std::uint8_t> flags_;
  std::vector<std::int64_t> emp_dom_;
  std::vector<std::int64_t> emp_mne_;
};

/// Indicator bitmask for one cell. Presence means strictly more than
/// `threshold` employees; exclusive sets require zero employment of the
/// other ownership type, overlap requires both above threshold.
std::uint8_t classify(std::int64_t emp_dom, std::int64_t emp_mne, int threshold);

PresenceCube build_presence(const EmploymentPanel& panel, int threshold = 5);

struct PeriodSpec {
  std::string name;
  int base_year = 0;
  int end_year = 0;
};

/// Parses "2006-2009" (name defaults to the text itself) or "name:2006:2009".
PeriodSpec parse_period(const std::string& text);
std::vector<PeriodSpec> default_periods();
/// Throws unless every period has base < end and periods are ordered and disjoint.
void validate_periods(const std::vector<PeriodSpec>& periods);

struct TransitionRow {
  std::size_t industry = 0;
  std::size_t region = 0;
  std::size_t period = 0;
  bool entry = false;
  bool exit = false;
  bool in_entry_sample = false;
  bool in_exit_sample = false;
};

/// One row per (industry, region, period), ordered by period, region, industry.
struct TransitionTable {
  std::vector<PeriodSpec> periods;
  std::vector<TransitionRow> rows;
};

TransitionTable label_transitions(const PresenceCube& cube, const std::vector<PeriodSpec>& periods);

enum class CurveDirection { Forward, Backward };

struct CurvePoint {
  int year = 0;
  std::optional<double> share;  // empty when no domestic presence that year
};

/// Forward: share of year-t domestic presences that are also present at the
/// anchor year. Backward: share of year-t presences still present in the
/// last cube year (the anchor only has to exist).
std::vector<CurvePoint> structural_change_curve(const PresenceCube& cube, int anchor_year,
                                                CurveDirection direction);

enum class EntryFilter { IntoExclusiveMne, All };
enum class EntryGrouping { Year, Region, SectorPrefix };

/// Entry counts keyed by the period's end year, the region, or the first two
/// characters of the industry code. Every key of the chosen axis is present.
std::map<std::string, long> entry_counts(const TransitionTable& table, const PresenceCube& cube,
                                         EntryFilter filter, EntryGrouping group_by);

void write_transitions(const TransitionTable& table, const PresenceCube& cube,
                       const std::filesystem::path& path);
void write_curve(const std::vector<CurvePoint>& curve, const std::filesystem::path& path);
void write_counts(const std::map<std::string, long>& counts, const std::string& key_name,
                  const std::filesystem::path& path);

}  // namespace mnec
