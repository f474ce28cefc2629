// Command-line front end: network construction, presence labelling,
// cohesion, regression grid, descriptives, synthetic fixtures.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mnec/csv.hpp"
#include "mnec/pipeline.hpp"
#include "mnec/synth.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string flows;
  std::string panel;
  std::string crosswalk;
  std::string output;
  std::vector<std::string> periods;
  std::optional<int> threshold;
  std::optional<int> steps;
  std::optional<int> network_year;
  bool cluster_by_region = false;
  std::string families;
  bool no_industry_fe = false;
  bool no_region_fe = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config, "key = value run configuration");
  cmd->add_option("--flows", f.flows, "labour flow CSV (from,to,count)");
  cmd->add_option("--panel", f.panel, "employment panel CSV (industry,region,year,emp_dom,emp_mne)");
  cmd->add_option("--crosswalk", f.crosswalk, "classification crosswalk CSV (source,target)");
  cmd->add_option("-o,--out", f.output, "output directory");
  cmd->add_option("--period", f.periods, "period as BASE-END or NAME:BASE:END (repeatable)");
  cmd->add_option("--threshold", f.threshold, "presence threshold (employees strictly above)");
  cmd->add_option("--steps", f.steps, "random-walk length for strategic closeness");
  cmd->add_option("--network-year", f.network_year, "year used for node MNE shares");
  cmd->add_flag("--cluster-by-region", f.cluster_by_region, "cluster robust standard errors by region");
  cmd->add_option("--families", f.families, "comma list of measure families: wc, sc, wc+sc");
  cmd->add_flag("--no-industry-fe", f.no_industry_fe, "drop industry fixed effects");
  cmd->add_flag("--no-region-fe", f.no_region_fe, "drop region fixed effects");
}

mnec::RunConfig resolve(const CommonFlags& f) {
  mnec::RunConfig config = f.config.empty() ? mnec::RunConfig{} : mnec::load_config(f.config);
  if (!f.flows.empty()) mnec::apply_setting(config, "flows", f.flows);
  if (!f.panel.empty()) mnec::apply_setting(config, "panel", f.panel);
  if (!f.crosswalk.empty()) mnec::apply_setting(config, "crosswalk", f.crosswalk);
  if (!f.output.empty()) mnec::apply_setting(config, "output", f.output);
  if (!f.periods.empty()) {
    config.periods.clear();
    for (const auto& p : f.periods) config.periods.push_back(mnec::parse_period(p));
  }
  if (f.threshold) mnec::apply_setting(config, "threshold", std::to_string(*f.threshold));
  if (f.steps) mnec::apply_setting(config, "steps", std::to_string(*f.steps));
  if (f.network_year) config.network_year = *f.network_year;
  if (f.cluster_by_region) config.cluster_by_region = true;
  if (!f.families.empty()) mnec::apply_setting(config, "families", f.families);
  if (f.no_industry_fe) config.industry_fe = false;
  if (f.no_region_fe) config.region_fe = false;
  mnec::validate_periods(config.periods);
  if (config.flows.empty() && config.panel.empty())
    throw mnec::Error(mnec::ErrorKind::Validation, "no inputs: pass --config or --flows/--panel");
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Industry-space cohesion of domestic and MNE industries"};
  app.set_version_flag("--version", mnec::kVersion);
  app.require_subcommand(1);

  CommonFlags flags;
  using Runner = std::vector<std::filesystem::path> (*)(const mnec::RunConfig&, std::ostream&);
  struct Command {
    const char* name;
    const char* help;
    Runner run;
  };
  const Command commands[] = {
      {"build-network", "build the relatedness network; write edges.csv and nodes.csv", mnec::run_build_network},
      {"presence", "label presence, entries and exits; write transitions and plot series", mnec::run_presence},
      {"cohesion", "compute weighted and strategic closeness; write cohesion.csv", mnec::run_cohesion},
      {"regress", "fit the entry/exit probit grid; write results.csv", mnec::run_regress},
      {"describe", "write descriptors.csv and correlations.csv", mnec::run_describe},
      {"pipeline", "run every stage and write manifest.json", mnec::run_pipeline},
  };
  std::vector<std::pair<CLI::App*, Runner>> registered;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, flags);
    registered.emplace_back(sub, c.run);
  }

  mnec::SynthConfig synth;
  std::string synth_out = "synth";
  std::vector<std::string> effects;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic fixture with known entry effects");
  synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth_cmd->add_option("--industries", synth.n_industries);
  synth_cmd->add_option("--regions", synth.n_regions);
  synth_cmd->add_option("--years", synth.years);
  synth_cmd->add_option("--start-year", synth.start_year);
  synth_cmd->add_option("--blocks", synth.n_blocks, "planted relatedness communities");
  synth_cmd->add_option("--effect", effects, "latent entry coefficient NAME=VALUE (repeatable)");
  synth_cmd->add_option("--intercept", synth.entry_intercept, "latent entry intercept");
  synth_cmd->add_option("--exit-rate", synth.exit_rate);
  synth_cmd->add_option("--noise", synth.noise_scale, "log-normal spread of flows and sizes");
  synth_cmd->add_option("--threshold", synth.threshold);
  synth_cmd->add_option("-o,--out", synth_out, "fixture directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) {
      for (const auto& e : effects) {
        const auto eq = e.find('=');
        if (eq == std::string::npos)
          throw mnec::Error(mnec::ErrorKind::Validation, "--effect expects NAME=VALUE, got '" + e + "'");
        synth.entry_effect[e.substr(0, eq)] = mnec::csv::parse_double(e.substr(eq + 1), 0, "effect");
      }
      const auto data = mnec::generate(synth);
      mnec::write_synth(synth, data, synth_out);
      std::cerr << "synth: wrote fixture to " << synth_out << '\n';
      return 0;
    }
    for (const auto& [sub, run] : registered) {
      if (!sub->parsed()) continue;
      const auto config = resolve(flags);
      for (const auto& path : run(config, std::cerr)) std::cout << path.string() << '\n';
      return 0;
    }
  } catch (const mnec::Error& e) {
    std::cerr << "error (" << mnec::to_string(e.kind()) << "): " << e.what() << '\n';
    return mnec::exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << '\n';
    return 3;
  }
  return 0;
}
