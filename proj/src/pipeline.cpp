#include "mnec/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mnec/analytics.hpp"
#include "mnec/cohesion.hpp"
#include "mnec/csv.hpp"
#include "mnec/ingest.hpp"
#include "mnec/relatedness.hpp"

namespace mnec {

namespace {

template <class F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("[") + name + "] " + e.what());
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw Error(ErrorKind::Validation, "config key '" + key + "' expects a boolean, got '" + value + "'");
}

int parse_config_int(const std::string& key, const std::string& value) {
  try {
    return static_cast<int>(csv::parse_int(value, 0, key));
  } catch (const Error&) {
    throw Error(ErrorKind::Validation, "config key '" + key + "' expects an integer, got '" + value + "'");
  }
}

Family parse_family(const std::string& name) {
  if (name == "wc") return Family::Wc;
  if (name == "sc") return Family::Sc;
  if (name == "wc+sc" || name == "combined") return Family::Combined;
  throw Error(ErrorKind::Validation, "unknown measure family '" + name + "'");
}

void report(std::ostream& log, const Warnings& warnings, const char* stage_name) {
  constexpr std::size_t kShown = 5;
  for (std::size_t i = 0; i < std::min(kShown, warnings.size()); ++i)
    log << "warning [" << stage_name << "]: " << warnings[i] << '\n';
  if (warnings.size() > kShown)
    log << "warning [" << stage_name << "]: ... " << warnings.size() - kShown << " more\n";
}

void ensure_output(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw Error(ErrorKind::Io, "cannot create output directory " + dir.string());
}

struct Loaded {
  std::optional<RelatednessNetwork> network;
  std::optional<EmploymentPanel> panel;
  std::optional<PresenceCube> cube;
  std::optional<TransitionTable> transitions;
  std::optional<CohesionTable> cohesion;
};

RelatednessNetwork load_network(const RunConfig& config, std::ostream& log) {
  FlowMatrix flows = stage("ingest", [&] {
    Warnings warnings;
    auto f = load_flows(config.flows, &warnings);
    report(log, warnings, "ingest");
    return f;
  });
  if (config.crosswalk) {
    const Crosswalk xwalk = stage("ingest", [&] { return load_crosswalk(*config.crosswalk); });
    flows = stage("relatedness", [&] { return convert_scheme(flows, xwalk); });
  } else {
    flows.scheme = Scheme::Target;
  }
  return stage("relatedness", [&] { return build_relatedness(flows); });
}

void load_panel_stage(const RunConfig& config, Loaded& in) {
  validate_periods(config.periods);
  in.panel = stage("ingest", [&] { return load_panel(config.panel); });
  in.cube = stage("panel", [&] { return build_presence(*in.panel, config.threshold); });
  in.transitions = stage("panel", [&] { return label_transitions(*in.cube, config.periods); });
}

void load_cohesion_stage(const RunConfig& config, Loaded& in, std::ostream& log) {
  if (!in.network) in.network = load_network(config, log);
  if (!in.cube) load_panel_stage(config, in);
  in.cohesion = stage("cohesion", [&] { return cohesion_panel(*in.network, *in.cube, config.periods, config.steps); });
  report(log, in.cohesion->warnings, "cohesion");
}

std::vector<std::filesystem::path> write_network(const RunConfig& config, Loaded& in) {
  const int year = config.network_year.value_or(config.periods.front().base_year);
  const auto edges = config.output / "edges.csv";
  const auto nodes = config.output / "nodes.csv";
  stage("relatedness", [&] {
    export_network(*in.network, *in.panel, year, edges, nodes);
    return 0;
  });
  return {edges, nodes};
}

std::vector<std::filesystem::path> write_regressions(const RunConfig& config, Loaded& in, std::ostream& log) {
  GridOptions options;
  options.families = config.families;
  options.industry_fe = config.industry_fe;
  options.region_fe = config.region_fe;
  options.fit.cluster_by_region = config.cluster_by_region;
  const auto cells = stage("econometrics", [&] {
    return run_specification_grid(*in.transitions, *in.cohesion, *in.cube, options);
  });
  std::size_t failed = 0;
  for (const auto& c : cells) failed += !c.result;
  if (failed > 0) log << "warning [econometrics]: " << failed << " of " << cells.size() << " specifications failed\n";
  if (!cells.empty() && failed == cells.size())
    throw Error(ErrorKind::Estimation, "[econometrics] no specification could be estimated: " + cells.front().error);
  const auto path = config.output / "results.csv";
  stage("econometrics", [&] {
    write_results(cells, *in.transitions, path);
    return 0;
  });
  return {path};
}

std::vector<std::filesystem::path> write_analytics(const RunConfig& config, Loaded& in, std::ostream& log) {
  return stage("analytics", [&] {
    const auto columns = analysis_columns(*in.transitions, *in.cohesion, *in.cube);
    Warnings warnings;
    auto rows = describe(columns, &warnings);
    const auto presence = presence_size_columns(*in.cube);
    auto more = describe(presence, &warnings);
    rows.insert(rows.end(), more.begin(), more.end());
    report(log, warnings, "analytics");
    const auto descriptors = config.output / "descriptors.csv";
    const auto correlations = config.output / "correlations.csv";
    write_descriptors(rows, descriptors);
    write_correlations(pairwise_correlations(columns), correlations);
    return std::vector<std::filesystem::path>{descriptors, correlations};
  });
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir) {
  auto path = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  if (key == "flows") {
    config.flows = path(value);
  } else if (key == "panel") {
    config.panel = path(value);
  } else if (key == "crosswalk") {
    if (value.empty())
      config.crosswalk.reset();
    else
      config.crosswalk = path(value);
  } else if (key == "output") {
    config.output = path(value);
  } else if (key == "periods") {
    config.periods.clear();
    for (const auto& item : split_list(value)) config.periods.push_back(parse_period(item));
  } else if (key == "threshold") {
    config.threshold = parse_config_int(key, value);
  } else if (key == "steps") {
    config.steps = parse_config_int(key, value);
  } else if (key == "network_year") {
    config.network_year = parse_config_int(key, value);
  } else if (key == "cluster_by_region") {
    config.cluster_by_region = parse_bool(key, value);
  } else if (key == "industry_fe") {
    config.industry_fe = parse_bool(key, value);
  } else if (key == "region_fe") {
    config.region_fe = parse_bool(key, value);
  } else if (key == "families") {
    config.families.clear();
    for (const auto& item : split_list(value)) config.families.push_back(parse_family(item));
  } else {
    throw Error(ErrorKind::Validation, "unknown config key '" + key + "'");
  }
  if (config.threshold < 0) throw Error(ErrorKind::Validation, "threshold must be non-negative");
  if (config.steps < 1) throw Error(ErrorKind::Validation, "steps must be at least 1");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  RunConfig config;
  const auto base = path.parent_path();
  bool saw_period = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Validation, path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    try {
      if (key == "period") {
        if (!saw_period) config.periods.clear();
        saw_period = true;
        config.periods.push_back(parse_period(value));
      } else {
        apply_setting(config, key, value, base);
      }
    } catch (const Error& e) {
      throw Error(e.kind(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate_periods(config.periods);
  return config;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::Io, "SHA-256 unavailable");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Estimation: return 1;
    case ErrorKind::Io: return 3;
    case ErrorKind::Parse:
    case ErrorKind::Validation:
    case ErrorKind::Coverage:
    case ErrorKind::Degenerate: return 2;
  }
  return 2;
}

std::vector<std::filesystem::path> run_build_network(const RunConfig& config, std::ostream& log) {
  Loaded in;
  in.network = load_network(config, log);
  in.panel = stage("ingest", [&] { return load_panel(config.panel); });
  ensure_output(config.output);
  log << "network: " << in.network->size() << " industries, " << in.network->edge_count() << " edges\n";
  return write_network(config, in);
}

std::vector<std::filesystem::path> run_presence(const RunConfig& config, std::ostream& log) {
  Loaded in;
  load_panel_stage(config, in);
  ensure_output(config.output);
  return stage("panel", [&] {
    const auto& cube = *in.cube;
    std::vector<std::filesystem::path> files;
    auto emit = [&](const std::string& name) { return files.emplace_back(config.output / name); };
    write_transitions(*in.transitions, cube, emit("transitions.csv"));
    write_curve(structural_change_curve(cube, cube.first_year(), CurveDirection::Forward),
                emit("structural_change_forward.csv"));
    write_curve(structural_change_curve(cube, cube.last_year(), CurveDirection::Backward),
                emit("structural_change_backward.csv"));
    write_counts(entry_counts(*in.transitions, cube, EntryFilter::IntoExclusiveMne, EntryGrouping::Year), "year",
                 emit("entries_excl_mne_by_year.csv"));
    write_counts(entry_counts(*in.transitions, cube, EntryFilter::IntoExclusiveMne, EntryGrouping::Region), "region",
                 emit("entries_excl_mne_by_region.csv"));
    write_counts(entry_counts(*in.transitions, cube, EntryFilter::IntoExclusiveMne, EntryGrouping::SectorPrefix),
                 "sector", emit("entries_excl_mne_by_sector.csv"));
    log << "presence: " << cube.n_industries() << " industries x " << cube.n_regions() << " regions x "
        << cube.n_years() << " years\n";
    return files;
  });
}

std::vector<std::filesystem::path> run_cohesion(const RunConfig& config, std::ostream& log) {
  Loaded in;
  load_cohesion_stage(config, in, log);
  ensure_output(config.output);
  const auto path = config.output / "cohesion.csv";
  stage("cohesion", [&] {
    write_cohesion(*in.cohesion, *in.cube, path);
    return 0;
  });
  return {path};
}

std::vector<std::filesystem::path> run_regress(const RunConfig& config, std::ostream& log) {
  Loaded in;
  load_cohesion_stage(config, in, log);
  ensure_output(config.output);
  return write_regressions(config, in, log);
}

std::vector<std::filesystem::path> run_describe(const RunConfig& config, std::ostream& log) {
  Loaded in;
  load_cohesion_stage(config, in, log);
  ensure_output(config.output);
  return write_analytics(config, in, log);
}

std::vector<std::filesystem::path> run_pipeline(const RunConfig& config, std::ostream& log) {
  Loaded in;
  // Ingest everything before any stage output exists.
  in.network = load_network(config, log);
  load_panel_stage(config, in);
  ensure_output(config.output);

  std::vector<std::filesystem::path> files = write_network(config, in);
  const auto transitions = config.output / "transitions.csv";
  stage("panel", [&] {
    write_transitions(*in.transitions, *in.cube, transitions);
    return 0;
  });
  files.push_back(transitions);

  load_cohesion_stage(config, in, log);
  const auto cohesion = config.output / "cohesion.csv";
  stage("cohesion", [&] {
    write_cohesion(*in.cohesion, *in.cube, cohesion);
    return 0;
  });
  files.push_back(cohesion);

  for (const auto& f : write_regressions(config, in, log)) files.push_back(f);
  for (const auto& f : write_analytics(config, in, log)) files.push_back(f);

  nlohmann::ordered_json manifest;
  manifest["tool"] = "mnec";
  manifest["version"] = kVersion;
  nlohmann::ordered_json cfg;
  cfg["threshold"] = config.threshold;
  cfg["steps"] = config.steps;
  cfg["cluster_by_region"] = config.cluster_by_region;
  cfg["industry_fe"] = config.industry_fe;
  cfg["region_fe"] = config.region_fe;
  cfg["network_year"] = config.network_year.value_or(config.periods.front().base_year);
  nlohmann::ordered_json families = nlohmann::ordered_json::array();
  for (auto f : config.families) families.push_back(to_string(f));
  cfg["families"] = families;
  nlohmann::ordered_json periods = nlohmann::ordered_json::array();
  for (const auto& p : config.periods)
    periods.push_back({{"name", p.name}, {"base_year", p.base_year}, {"end_year", p.end_year}});
  cfg["periods"] = periods;
  manifest["config"] = cfg;

  nlohmann::ordered_json inputs;
  auto digest = [](const std::filesystem::path& p) {
    return nlohmann::ordered_json{{"file", p.filename().string()}, {"sha256", sha256_file(p)}};
  };
  inputs["flows"] = digest(config.flows);
  inputs["panel"] = digest(config.panel);
  inputs["crosswalk"] = config.crosswalk ? digest(*config.crosswalk) : nlohmann::ordered_json(nullptr);
  manifest["inputs"] = inputs;
  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
  for (const auto& f : files) outputs.push_back(digest(f));
  manifest["outputs"] = outputs;

  const auto manifest_path = config.output / "manifest.json";
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + manifest_path.string());
  out << manifest.dump(2) << '\n';
  files.push_back(manifest_path);
  log << "pipeline: wrote " << files.size() << " files to " << config.output.string() << '\n';
  return files;
}

}  // namespace mnec
