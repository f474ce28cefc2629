#include "mnec/analytics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include "mnec/csv.hpp"

namespace mnec {

namespace {

bool selected(std::span<const char> mask, std::size_t i) { return mask.empty() || mask[i] != 0; }

}  // namespace

std::vector<DescriptorRow> describe(std::span<const NamedColumn> columns, Warnings* warnings) {
  std::vector<DescriptorRow> rows;
  for (const auto& col : columns) {
    DescriptorRow d;
    d.variable = col.name;
    d.sample = col.sample;
    double sum = 0.0;
    for (std::size_t i = 0; i < col.values.size(); ++i) {
      if (!selected(col.mask, i)) continue;
      const double v = col.values[i];
      if (d.n == 0) d.min = d.max = v;
      d.min = std::min(d.min, v);
      d.max = std::max(d.max, v);
      sum += v;
      ++d.n;
    }
    if (d.n == 0) {
      if (warnings) warnings->push_back("column " + col.name + " has no rows in sample " + col.sample);
      continue;
    }
    d.mean = sum / static_cast<double>(d.n);
    double ss = 0.0;
    for (std::size_t i = 0; i < col.values.size(); ++i)
      if (selected(col.mask, i)) ss += (col.values[i] - d.mean) * (col.values[i] - d.mean);
    d.sd = d.n > 1 ? std::sqrt(ss / static_cast<double>(d.n - 1)) : 0.0;
    // Rounding can push the mean of a constant column a hair outside [min, max].
    d.mean = std::clamp(d.mean, d.min, d.max);
    rows.push_back(std::move(d));
  }
  return rows;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y, std::span<const char> mask) {
  if (x.size() != y.size()) throw Error(ErrorKind::Validation, "correlation columns differ in length");
  double n = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!selected(mask, i)) continue;
    n += 1.0;
    sx += x[i];
    sy += y[i];
  }
  if (n < 2.0) return std::nullopt;
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!selected(mask, i)) continue;
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<CorrelationEntry> pairwise_correlations(std::span<const NamedColumn> columns) {
  if (columns.size() < 2) throw Error(ErrorKind::Validation, "correlations need at least two columns");
  std::vector<CorrelationEntry> out;
  for (const auto& a : columns)
    for (const auto& b : columns) {
      if (a.values.size() != b.values.size())
        throw Error(ErrorKind::Validation, "columns " + a.name + " and " + b.name + " differ in length");
      std::vector<char> mask;
      std::string sample = "all";
      if (!a.mask.empty() || !b.mask.empty()) {
        mask.assign(a.values.size(), 1);
        for (std::size_t i = 0; i < mask.size(); ++i)
          mask[i] = static_cast<char>(selected(a.mask, i) && selected(b.mask, i));
        if (!a.mask.empty() && !b.mask.empty() && a.sample != b.sample)
          sample = a.sample + "&" + b.sample;
        else
          sample = a.mask.empty() ? b.sample : a.sample;
      }
      CorrelationEntry e{a.name, b.name, sample, 0, std::nullopt};
      e.n = mask.empty() ? static_cast<long>(a.values.size()) : static_cast<long>(std::count(mask.begin(), mask.end(), 1));
      e.r = pearson(a.values, b.values, mask);
      out.push_back(std::move(e));
    }
  return out;
}

std::vector<NamedColumn> analysis_columns(const TransitionTable& table, const CohesionTable& cohesion,
                                          const PresenceCube& cube) {
  if (cohesion.rows.size() != table.rows.size())
    throw Error(ErrorKind::Validation, "cohesion and transition tables have different row counts");
  const std::size_t n = table.rows.size();
  NamedColumn entry{"entry_d", {}, {}, "entry"};
  NamedColumn exit{"exit_d", {}, {}, "exit"};
  NamedColumn mne{"mne_presence", {}, {}, "all"};
  std::array<NamedColumn, 6> cohesive;
  const char* names[] = {"wc_excl_d", "wc_excl_m", "wc_overlap", "sc_excl_d", "sc_excl_m", "sc_overlap"};
  for (std::size_t k = 0; k < cohesive.size(); ++k) {
    cohesive[k].name = names[k];
    cohesive[k].values.reserve(n);
  }
  for (auto* c : {&entry, &exit, &mne}) c->values.reserve(n);
  entry.mask.reserve(n);
  exit.mask.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& t = table.rows[k];
    const auto& c = cohesion.rows[k];
    entry.values.push_back(t.entry);
    entry.mask.push_back(t.in_entry_sample);
    exit.values.push_back(t.exit);
    exit.mask.push_back(t.in_exit_sample);
    mne.values.push_back(cube.has(Indicator::Mne, t.industry, t.region, table.periods[t.period].base_year));
    for (std::size_t p = 1; p < 4; ++p) {
      cohesive[p - 1].values.push_back(c.wc[p]);
      cohesive[p + 2].values.push_back(c.sc[p]);
    }
  }
  std::vector<NamedColumn> out{std::move(entry), std::move(exit), std::move(mne)};
  for (auto& c : cohesive) out.push_back(std::move(c));
  return out;
}

std::vector<NamedColumn> presence_size_columns(const PresenceCube& cube) {
  struct Spec {
    const char* presence;
    const char* size;
    Indicator indicator;
  };
  const Spec specs[] = {{"x_d", "emp_d", Indicator::Domestic},
                        {"x_m", "emp_m", Indicator::Mne},
                        {"x_excl_d", "emp_excl_d", Indicator::ExclDomestic},
                        {"x_excl_m", "emp_excl_m", Indicator::ExclMne},
                        {"x_overlap", "emp_overlap", Indicator::Overlap}};
  std::vector<NamedColumn> presence;
  std::vector<NamedColumn> size;
  for (const auto& s : specs) {
    presence.push_back(NamedColumn{s.presence, {}, {}, "cells"});
    size.push_back(NamedColumn{s.size, {}, {}, "cells"});
  }
  for (std::size_t r = 0; r < cube.n_regions(); ++r)
    for (std::size_t j = 0; j < cube.n_industries(); ++j)
      for (int y = cube.first_year(); y <= cube.last_year(); ++y) {
        const auto dom = static_cast<double>(cube.emp_dom(j, r, y));
        const auto mne = static_cast<double>(cube.emp_mne(j, r, y));
        for (std::size_t k = 0; k < 5; ++k) {
          const bool on = cube.has(specs[k].indicator, j, r, y);
          presence[k].values.push_back(on);
          double emp = 0.0;
          switch (specs[k].indicator) {
            case Indicator::Domestic: emp = dom; break;
            case Indicator::Mne: emp = mne; break;
            // Employment of the set the cell belongs to, zero otherwise.
            case Indicator::ExclDomestic: emp = on ? dom : 0.0; break;
            case Indicator::ExclMne: emp = on ? mne : 0.0; break;
            case Indicator::Overlap: emp = on ? dom + mne : 0.0; break;
          }
          size[k].values.push_back(emp);
        }
      }
  for (auto& c : size) presence.push_back(std::move(c));
  return presence;
}

void write_descriptors(std::span<const DescriptorRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  csv::write_row(out, {"variable", "sample", "n", "mean", "sd", "min", "max"});
  auto f = [](double v) { return csv::format_sig(v, 12); };
  for (const auto& d : rows)
    csv::write_row(out, {d.variable, d.sample, std::to_string(d.n), f(d.mean), f(d.sd), f(d.min), f(d.max)});
}

void write_correlations(std::span<const CorrelationEntry> entries, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  csv::write_row(out, {"var_a", "var_b", "sample", "n", "correlation"});
  for (const auto& e : entries)
    csv::write_row(out, {e.a, e.b, e.sample, std::to_string(e.n), e.r ? csv::format_sig(*e.r, 12) : "NA"});
}

}  // namespace mnec
