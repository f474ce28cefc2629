#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mnec/ingest.hpp"
#include "mnec/panel.hpp"

namespace mnec {

/// Portable random source: std::mt19937_64 (whose output sequence the C++
/// standard fixes) with uniforms and normals derived here rather than via
/// implementation-defined std distributions.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  /// 53-bit uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Box-Muller, one draw per call (the partner draw is discarded).
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  int n_industries = 40;
  int n_regions = 8;
  int years = 2;
  int start_year = 2006;
  int n_blocks = 4;
  /// Latent entry coefficients keyed by regressor name (wc_excl_d, ...,
  /// sc_overlap, x_m).
  std::map<std::string, double> entry_effect;
  double entry_intercept = -0.8;
  double exit_rate = 0.08;
  double noise_scale = 0.5;  // log-normal spread of flows and employment sizes
  int threshold = 5;
  double domestic_share = 0.4;  // initial domestic presence probability
  double mne_share = 0.3;       // MNE presence probability
  double mne_turnover = 0.05;   // yearly chance an MNE presence flips
  double cross_block_flow = 0.05;
};

/// Throws Error(Validation) for infeasible settings.
void validate(const SynthConfig& config);

struct SynthData {
  FlowMatrix flows;
  EmploymentPanel panel;
  Crosswalk crosswalk;  // identity
  std::vector<int> block_of;  // planted community per industry
  std::vector<PeriodSpec> periods;
};

/// Block-structured flows and an ownership-split employment panel in which a
/// domestically absent cell enters in year t + 1 with probability
/// Phi(intercept + sum effect * Z(t)), Z being the cohesion measures on the
/// relatedness network built from the generated flows.
SynthData generate(const SynthConfig& config);

/// Consecutive disjoint (base, end) pairs over the generated years.
std::vector<PeriodSpec> synth_periods(const SynthConfig& config);

/// Writes flows.csv, panel.csv, crosswalk.csv, ground_truth.json and
/// pipeline.cfg into `dir`.
void write_synth(const SynthConfig& config, const SynthData& data, const std::filesystem::path& dir);

}  // namespace mnec
