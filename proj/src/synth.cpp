#include "mnec/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "mnec/cohesion.hpp"
#include "mnec/normal.hpp"
#include "mnec/relatedness.hpp"

namespace mnec {

double SynthRng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t SynthRng::integer(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<double>(hi - lo + 1);
  return lo + static_cast<std::int64_t>(std::floor(uniform() * span));
}

namespace {

const std::vector<std::string>& effect_names() {
  static const std::vector<std::string> names{"wc_excl_d", "wc_excl_m", "wc_overlap", "sc_excl_d",
                                              "sc_excl_m", "sc_overlap", "x_m"};
  return names;
}

std::string industry_code(int block, int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d%02d", 10 + block, k);
  return buf;
}

std::string region_name(int r) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "R%02d", r + 1);
  return buf;
}

std::int64_t present_size(SynthRng& rng, double noise) {
  return 6 + static_cast<std::int64_t>(std::llround(30.0 * std::exp(noise * rng.normal())));
}

std::int64_t absent_size(SynthRng& rng) { return rng.bernoulli(0.8) ? 0 : rng.integer(1, 5); }

}  // namespace

void validate(const SynthConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Validation, "synth config: " + m); };
  if (c.n_blocks < 1 || c.n_blocks > 89) fail("n_blocks must be in [1, 89]");
  if (c.n_industries < 2 * c.n_blocks) fail("n_industries must be at least 2 * n_blocks");
  if ((c.n_industries + c.n_blocks - 1) / c.n_blocks > 100) fail("at most 100 industries per block");
  if (c.n_regions < 1 || c.n_regions > 99) fail("n_regions must be in [1, 99]");
  if (c.years < 2) fail("years must be at least 2");
  if (!(c.noise_scale > 0.0)) fail("noise_scale must be positive");
  if (c.threshold < 0) fail("threshold must be non-negative");
  for (double p : {c.domestic_share, c.mne_share, c.mne_turnover, c.exit_rate})
    if (!(p >= 0.0 && p <= 1.0)) fail("probabilities must lie in [0, 1]");
  if (!(c.cross_block_flow > 0.0)) fail("cross_block_flow must be positive");
  for (const auto& [name, value] : c.entry_effect) {
    if (std::find(effect_names().begin(), effect_names().end(), name) == effect_names().end())
      fail("unknown entry effect '" + name + "'");
    if (!std::isfinite(value)) fail("entry effect '" + name + "' is not finite");
  }
}

std::vector<PeriodSpec> synth_periods(const SynthConfig& config) {
  std::vector<PeriodSpec> periods;
  for (int y = config.start_year; y + 1 < config.start_year + config.years; y += 2) {
    PeriodSpec p{std::to_string(y) + "-" + std::to_string(y + 1), y, y + 1};
    periods.push_back(p);
  }
  return periods;
}

SynthData generate(const SynthConfig& config) {
  validate(config);
  SynthRng rng(config.seed);
  const int n = config.n_industries;
  const double noise = config.noise_scale;

  SynthData data;
  data.periods = synth_periods(config);
  std::vector<std::string> codes;
  std::vector<int> within(static_cast<std::size_t>(config.n_blocks), 0);
  for (int i = 0; i < n; ++i) {
    const int b = i * config.n_blocks / n;
    data.block_of.push_back(b);
    codes.push_back(industry_code(b, within[static_cast<std::size_t>(b)]++));
  }

  std::vector<double> size(static_cast<std::size_t>(n));
  for (auto& s : size) s = std::exp(noise * rng.normal());
  data.flows.scheme = Scheme::Source;
  data.flows.codes = codes;
  data.flows.counts = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      const double affinity = data.block_of[ui] == data.block_of[uj] ? 1.0 : config.cross_block_flow;
      const double mean = 100.0 * size[ui] * size[uj] * affinity;
      const double draw = mean * std::exp(noise * rng.normal() - 0.5 * noise * noise);
      data.flows.counts(i, j) = std::round(draw * 100.0) / 100.0;
    }
  for (const auto& code : codes) data.crosswalk.pairs.push_back({code, code});

  const RelatednessNetwork net = build_relatedness(data.flows);

  std::vector<std::string> regions;
  for (int r = 0; r < config.n_regions; ++r) regions.push_back(region_name(r));
  const auto cells = static_cast<std::size_t>(config.n_regions) * static_cast<std::size_t>(n);
  std::vector<std::int64_t> dom(cells);
  std::vector<std::int64_t> mne(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    dom[c] = rng.bernoulli(config.domestic_share) ? present_size(rng, noise) : absent_size(rng);
    mne[c] = rng.bernoulli(config.mne_share) ? present_size(rng, noise) : absent_size(rng);
  }

  auto effect = [&](const std::string& name) {
    auto it = config.entry_effect.find(name);
    return it == config.entry_effect.end() ? 0.0 : it->second;
  };
  const std::array<double, 3> wc_effect{effect("wc_excl_d"), effect("wc_excl_m"), effect("wc_overlap")};
  const std::array<double, 3> sc_effect{effect("sc_excl_d"), effect("sc_excl_m"), effect("sc_overlap")};
  const double xm_effect = effect("x_m");

  std::vector<PanelRecord> records;
  const int last = config.start_year + config.years - 1;
  for (int year = config.start_year; year <= last; ++year) {
    PresenceCube cube(codes, regions, year, year, config.threshold);
    for (std::size_t r = 0; r < regions.size(); ++r)
      for (std::size_t j = 0; j < codes.size(); ++j) {
        const auto c = r * codes.size() + j;
        cube.set_employment(j, r, year, dom[c], mne[c]);
        if (dom[c] > 0 || mne[c] > 0) records.push_back({codes[j], regions[r], year, dom[c], mne[c]});
      }
    if (year == last) break;

    for (std::size_t r = 0; r < regions.size(); ++r) {
      std::vector<double> latent(codes.size(), config.entry_intercept);
      for (std::size_t k = 0; k < 3; ++k) {
        if (wc_effect[k] == 0.0 && sc_effect[k] == 0.0) continue;
        const auto part = static_cast<Partition>(k + 1);
        const auto x = presence_vector(net, cube, r, year, part);
        const auto wc = weighted_closeness(net, x);
        const auto sc = strategic_closeness(net, x, 2);
        for (std::size_t j = 0; j < codes.size(); ++j) latent[j] += wc_effect[k] * wc[j] + sc_effect[k] * sc[j];
      }
      for (std::size_t j = 0; j < codes.size(); ++j) {
        const auto c = r * codes.size() + j;
        const bool mne_present = cube.has(Indicator::Mne, j, r, year);
        if (cube.has(Indicator::Domestic, j, r, year)) {
          if (rng.bernoulli(config.exit_rate))
            dom[c] = rng.integer(0, config.threshold);
          else
            dom[c] = std::max<std::int64_t>(config.threshold + 1,
                                            std::llround(static_cast<double>(dom[c]) * std::exp(0.1 * rng.normal())));
        } else {
          const double eta = latent[j] + (mne_present ? xm_effect : 0.0);
          if (rng.bernoulli(normal::cdf(eta))) dom[c] = present_size(rng, noise);
        }
        if (rng.bernoulli(config.mne_turnover))
          mne[c] = mne_present ? absent_size(rng) : present_size(rng, noise);
      }
    }
  }
  data.panel = make_panel(std::move(records));
  return data;
}

void write_synth(const SynthConfig& config, const SynthData& data, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  write_flows(data.flows, dir / "flows.csv");
  write_panel(data.panel, dir / "panel.csv");
  write_crosswalk(data.crosswalk, dir / "crosswalk.csv");

  nlohmann::ordered_json truth;
  truth["generator"] = "mt19937_64";
  truth["seed"] = config.seed;
  truth["entry_intercept"] = config.entry_intercept;
  nlohmann::ordered_json effects = nlohmann::ordered_json::object();
  for (const auto& [name, value] : config.entry_effect) effects[name] = value;
  truth["entry_effect"] = effects;
  truth["exit_rate"] = config.exit_rate;
  truth["n_industries"] = config.n_industries;
  truth["n_regions"] = config.n_regions;
  truth["years"] = config.years;
  truth["start_year"] = config.start_year;
  truth["n_blocks"] = config.n_blocks;
  truth["noise_scale"] = config.noise_scale;
  truth["threshold"] = config.threshold;
  std::ofstream json(dir / "ground_truth.json", std::ios::binary);
  if (!json) throw Error(ErrorKind::Io, "cannot write ground_truth.json");
  json << truth.dump(2) << '\n';

  std::ofstream cfg(dir / "pipeline.cfg", std::ios::binary);
  if (!cfg) throw Error(ErrorKind::Io, "cannot write pipeline.cfg");
  cfg << "# generated by mnec synth\n"
      << "flows = flows.csv\n"
      << "panel = panel.csv\n"
      << "crosswalk = crosswalk.csv\n"
      << "threshold = " << config.threshold << '\n'
      << "network_year = " << config.start_year << '\n';
  for (const auto& p : data.periods) cfg << "period = " << p.name << ':' << p.base_year << ':' << p.end_year << '\n';
}

}  // namespace mnec
