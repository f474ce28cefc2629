#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mnec/error.hpp"
#include "mnec/panel.hpp"
#include "mnec/relatedness.hpp"

namespace mnec {

enum class Partition { All = 0, ExclDomestic = 1, ExclMne = 2, Overlap = 3 };
inline constexpr std::array<Partition, 4> kPartitions{Partition::All, Partition::ExclDomestic, Partition::ExclMne,
                                                      Partition::Overlap};

const char* to_string(Partition p);

/// Presence of the partition's ownership set for every network industry in
/// (region, year). Network industries missing from the cube are absent.
/// All means domestic or MNE presence.
std::vector<std::uint8_t> presence_vector(const RelatednessNetwork& net, const PresenceCube& cube,
                                          std::size_t region, int year, Partition partition);

/// WC(i) = sum_{j != i} A(i, j) X(j), accumulated over i's neighbours in
/// index order.
std::vector<double> weighted_closeness(const RelatednessNetwork& net, std::span<const std::uint8_t> present);

/// Distribution of a random walker after `steps` moves on D^-1 A, started
/// uniformly on the present industries.
///
/// Present industries with zero degree cannot move; they are left out of the
/// starting distribution (their mass goes to the other present industries)
/// and a warning is recorded. With nothing left to start from the result is
/// all zeros.
std::vector<double> strategic_closeness(const RelatednessNetwork& net, std::span<const std::uint8_t> present,
                                        int steps = 2, Warnings* warnings = nullptr);

struct CohesionRow {
  std::size_t industry = 0;  // cube axis index
  std::size_t region = 0;
  std::size_t period = 0;
  std::array<double, 4> wc{};  // indexed by Partition
  std::array<double, 4> sc{};
};

/// Rows follow TransitionTable order: period, region, industry.
struct CohesionTable {
  std::vector<PeriodSpec> periods;
  std::vector<CohesionRow> rows;
  Warnings warnings;
};

/// Evaluates all WC and SC measures at each period's base year for every
/// cube industry. Cube industries absent from the network score zero.
CohesionTable cohesion_panel(const RelatednessNetwork& net, const PresenceCube& cube,
                             const std::vector<PeriodSpec>& periods, int steps = 2);

void write_cohesion(const CohesionTable& table, const PresenceCube& cube, const std::filesystem::path& path);

}  // namespace mnec
