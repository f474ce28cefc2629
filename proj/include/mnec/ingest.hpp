#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mnec/error.hpp"

namespace mnec {

/// Which classification an industry code belongs to. Codes themselves are
/// opaque strings so that leading zeros ("0121") survive.
enum class Scheme { Source, Target };

/// Average annual worker transitions between industries, counts(i, j) being
/// the flow from codes[i] to codes[j]. The diagonal is kept as loaded but is
/// ignored when relatedness is built.
struct FlowMatrix {
  Scheme scheme = Scheme::Source;
  std::vector<std::string> codes;
  Eigen::MatrixXd counts;

  std::size_t size() const { return codes.size(); }
  /// Index of `code`, or -1.
  std::ptrdiff_t index_of(const std::string& code) const;
};

struct PanelRecord {
  std::string industry;
  std::string region;
  int year = 0;
  std::int64_t emp_dom = 0;
  std::int64_t emp_mne = 0;

  friend bool operator==(const PanelRecord&, const PanelRecord&) = default;
};

/// Employment by (industry, region, year), split by ownership. Records are
/// kept sorted by (region, industry, year); absent keys mean zero employment.
struct EmploymentPanel {
  std::vector<PanelRecord> records;

  std::vector<std::string> industries() const;  // sorted, unique
  std::vector<std::string> regions() const;     // sorted, unique
  std::vector<int> years() const;               // sorted, unique
};

struct CrosswalkPair {
  std::string source;
  std::string target;

  friend auto operator<=>(const CrosswalkPair&, const CrosswalkPair&) = default;
};

/// Many-to-many correspondence between the SOURCE and TARGET schemes.
struct Crosswalk {
  std::vector<CrosswalkPair> pairs;  // deduplicated, first-appearance order

  std::vector<std::string> targets_of(const std::string& source) const;
};

FlowMatrix load_flows(const std::filesystem::path& path, Warnings* warnings = nullptr);
EmploymentPanel load_panel(const std::filesystem::path& path);
Crosswalk load_crosswalk(const std::filesystem::path& path);

/// Sorts and validates records; throws on duplicate keys or negative values.
EmploymentPanel make_panel(std::vector<PanelRecord> records);

/// Throws Error(Coverage) listing every flow code without a crosswalk pair.
void check_coverage(const Crosswalk& xwalk, const FlowMatrix& flows);

/// Writes every cell of the matrix (zeros included) so that code order and
/// values survive a reload exactly.
void write_flows(const FlowMatrix& flows, const std::filesystem::path& path);
void write_panel(const EmploymentPanel& panel, const std::filesystem::path& path);
void write_crosswalk(const Crosswalk& xwalk, const std::filesystem::path& path);

}  // namespace mnec
