#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mnec/cohesion.hpp"
#include "mnec/error.hpp"
#include "mnec/panel.hpp"

namespace mnec {

struct DescriptorRow {
  std::string variable;
  std::string sample;
  long n = 0;
  double mean = 0.0;
  double sd = 0.0;  // n - 1 denominator
  double min = 0.0;
  double max = 0.0;
};

/// Column of an analysis panel with the rows it applies to.
struct NamedColumn {
  std::string name;
  std::vector<double> values;
  std::vector<char> mask;  // empty: all rows
  std::string sample = "all";
};

/// Moments per column over its masked rows. Columns with no rows are skipped
/// with a warning.
std::vector<DescriptorRow> describe(std::span<const NamedColumn> columns, Warnings* warnings = nullptr);

struct CorrelationEntry {
  std::string a;
  std::string b;
  std::string sample;
  long n = 0;
  std::optional<double> r;  // empty for zero variance or no shared rows
};

/// Pearson correlation of two equally long columns over rows where `mask`
/// (if non-empty) is set.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y, std::span<const char> mask = {});

/// All ordered pairs, diagonal included. A pair uses the intersection of its
/// columns' masks and reports which samples were combined.
std::vector<CorrelationEntry> pairwise_correlations(std::span<const NamedColumn> columns);

/// Columns of the analysis panel aligned with the transition table: entry and
/// exit restricted to their model samples, MNE presence at the base year and
/// the six partitioned cohesion measures over all rows.
std::vector<NamedColumn> analysis_columns(const TransitionTable& table, const CohesionTable& cohesion,
                                          const PresenceCube& cube);

/// Presence indicators and employment per ownership set over every cube cell.
std::vector<NamedColumn> presence_size_columns(const PresenceCube& cube);

void write_descriptors(std::span<const DescriptorRow> rows, const std::filesystem::path& path);
void write_correlations(std::span<const CorrelationEntry> entries, const std::filesystem::path& path);

}  // namespace mnec
