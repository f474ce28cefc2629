#include "mnec/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "mnec/csv.hpp"
#include "mnec/normal.hpp"

namespace mnec {

const char* to_string(Outcome o) { return o == Outcome::Entry ? "entry" : "exit"; }

const char* to_string(Term t) {
  switch (t) {
    case Term::WcExclD: return "wc_excl_d";
    case Term::WcExclM: return "wc_excl_m";
    case Term::WcOverlap: return "wc_overlap";
    case Term::ScExclD: return "sc_excl_d";
    case Term::ScExclM: return "sc_excl_m";
    case Term::ScOverlap: return "sc_overlap";
  }
  return "unknown";
}

const char* to_string(Family f) {
  switch (f) {
    case Family::Wc: return "wc";
    case Family::Sc: return "sc";
    case Family::Combined: return "wc+sc";
  }
  return "unknown";
}

namespace {

double term_value(const CohesionRow& row, Term t) {
  switch (t) {
    case Term::WcExclD: return row.wc[static_cast<std::size_t>(Partition::ExclDomestic)];
    case Term::WcExclM: return row.wc[static_cast<std::size_t>(Partition::ExclMne)];
    case Term::WcOverlap: return row.wc[static_cast<std::size_t>(Partition::Overlap)];
    case Term::ScExclD: return row.sc[static_cast<std::size_t>(Partition::ExclDomestic)];
    case Term::ScExclM: return row.sc[static_cast<std::size_t>(Partition::ExclMne)];
    case Term::ScOverlap: return row.sc[static_cast<std::size_t>(Partition::Overlap)];
  }
  return 0.0;
}

// d log L / d eta for one observation.
double generalized_residual(double y, double eta) {
  return y > 0.5 ? normal::mills(eta) : -normal::mills(-eta);
}

// -d^2 log L / d eta^2 for one observation; strictly positive.
double curvature(double y, double eta) {
  if (y > 0.5) {
    const double l = normal::mills(eta);
    return l * (eta + l);
  }
  const double l = normal::mills(-eta);
  return l * (l - eta);
}

Eigen::MatrixXd information(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = x * beta;
  Eigen::VectorXd w(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) w(i) = curvature(y(i), eta(i));
  return x.transpose() * w.asDiagonal() * x;
}

}  // namespace

Design build_design(const TransitionTable& table, const CohesionTable& cohesion, const PresenceCube& cube,
                    const RegressionSpec& spec) {
  if (spec.cohesion_terms.empty() && !spec.include_mne_presence)
    throw Error(ErrorKind::Validation, "a specification needs a cohesion term or the MNE presence control");
  if (spec.period >= table.periods.size()) throw Error(ErrorKind::Validation, "period index out of range");
  if (cohesion.rows.size() != table.rows.size())
    throw Error(ErrorKind::Validation, "cohesion and transition tables have different row counts");

  const auto& period = table.periods[spec.period];
  std::vector<std::size_t> picked;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& t = table.rows[k];
    const auto& c = cohesion.rows[k];
    if (t.industry != c.industry || t.region != c.region || t.period != c.period)
      throw Error(ErrorKind::Validation, "cohesion and transition tables are not aligned");
    if (t.period != spec.period) continue;
    if (spec.outcome == Outcome::Entry ? t.in_entry_sample : t.in_exit_sample) picked.push_back(k);
  }
  if (picked.empty())
    throw Error(ErrorKind::Estimation, std::string("empty ") + to_string(spec.outcome) + " sample for period " +
                                           period.name);

  Design d;
  d.columns.push_back("intercept");
  for (auto t : spec.cohesion_terms) d.columns.push_back(to_string(t));
  if (spec.include_mne_presence) d.columns.push_back("x_m");

  const auto n = static_cast<Eigen::Index>(picked.size());
  d.x.resize(n, static_cast<Eigen::Index>(d.columns.size()));
  d.y.resize(n);
  d.cluster.reserve(picked.size());
  Factor industry{"industry", cube.industries(), {}};
  Factor region{"region", cube.regions(), {}};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = table.rows[picked[static_cast<std::size_t>(i)]];
    const auto& c = cohesion.rows[picked[static_cast<std::size_t>(i)]];
    Eigen::Index col = 0;
    d.x(i, col++) = 1.0;
    for (auto term : spec.cohesion_terms) d.x(i, col++) = term_value(c, term);
    if (spec.include_mne_presence) d.x(i, col++) = cube.has(Indicator::Mne, t.industry, t.region, period.base_year);
    d.y(i) = (spec.outcome == Outcome::Entry ? t.entry : t.exit) ? 1.0 : 0.0;
    industry.row_level.push_back(t.industry);
    region.row_level.push_back(t.region);
    d.cluster.push_back(t.region);
  }
  if (spec.industry_fe) d.factors.push_back(std::move(industry));
  if (spec.region_fe) d.factors.push_back(std::move(region));
  return d;
}

double probit_loglik(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += normal::log_cdf(y(i) > 0.5 ? eta(i) : -eta(i));
  return ll;
}

Eigen::MatrixXd probit_scores(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = x * beta;
  Eigen::VectorXd r(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) r(i) = generalized_residual(y(i), eta(i));
  return r.asDiagonal() * x;
}

Eigen::VectorXd probit_score(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = x * beta;
  Eigen::VectorXd r(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) r(i) = generalized_residual(y(i), eta(i));
  return x.transpose() * r;
}

Eigen::MatrixXd probit_hessian(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  return -information(x, y, beta);
}

NewtonResult newton_probit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const NewtonOptions& options) {
  NewtonResult res;
  res.beta = Eigen::VectorXd::Zero(x.cols());
  res.log_likelihood = probit_loglik(x, y, res.beta);
  res.trace.push_back(res.log_likelihood);

  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd g = probit_score(x, y, res.beta);
    if (g.cwiseAbs().maxCoeff() < options.score_tolerance) {
      res.converged = true;
      break;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(information(x, y, res.beta));
    if (ldlt.info() != Eigen::Success) break;
    const Eigen::VectorXd step = ldlt.solve(g);
    ++res.iterations;

    const double noise = 1e-12 * std::max(1.0, std::fabs(res.log_likelihood));
    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
      const Eigen::VectorXd candidate = res.beta + scale * step;
      const double ll = probit_loglik(x, y, candidate);
      if (std::isfinite(ll) && ll >= res.log_likelihood) {
        const double change = std::fabs(ll - res.log_likelihood) / std::max(std::fabs(res.log_likelihood), 1e-300);
        res.beta = candidate;
        res.log_likelihood = ll;
        res.trace.push_back(ll);
        accepted = true;
        if (change < options.relative_loglik_tolerance) res.converged = true;
        break;
      }
      // A full step whose gain is lost in the rounding of the log-likelihood
      // is judged by the score instead.
      if (halving == 0 && std::isfinite(ll) && res.log_likelihood - ll <= noise &&
          probit_score(x, y, candidate).cwiseAbs().maxCoeff() < g.cwiseAbs().maxCoeff()) {
        res.beta = candidate;
        res.trace.push_back(res.log_likelihood);
        accepted = true;
        res.converged = true;
        break;
      }
    }
    if (!accepted) {
      // No ascent along the Newton direction: at the optimum to working
      // precision when the predicted gain is negligible.
      res.converged = g.dot(step) < options.relative_loglik_tolerance * std::max(1.0, std::fabs(res.log_likelihood));
      break;
    }
    if (res.converged) break;
  }
  return res;
}

Eigen::VectorXd robust_se(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                          const std::vector<std::size_t>* clusters) {
  const Eigen::MatrixXd info = information(x, y, beta);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  const Eigen::VectorXd pivots = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || !(pivots.minCoeff() > 1e-14 * pivots.cwiseAbs().maxCoeff()) ||
      !(ldlt.rcond() > 1e-14))
    throw Error(ErrorKind::Estimation, "singular information matrix");
  const Eigen::MatrixXd info_inv = ldlt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));

  Eigen::MatrixXd scores = probit_scores(x, y, beta);
  if (clusters) {
    if (clusters->size() != static_cast<std::size_t>(x.rows()))
      throw Error(ErrorKind::Validation, "cluster vector size mismatch");
    std::map<std::size_t, Eigen::Index> slot;
    for (auto c : *clusters) slot.try_emplace(c, static_cast<Eigen::Index>(slot.size()));
    Eigen::MatrixXd summed = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(slot.size()), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) summed.row(slot[(*clusters)[static_cast<std::size_t>(i)]]) += scores.row(i);
    scores = std::move(summed);
  }
  const Eigen::MatrixXd meat = scores.transpose() * scores;
  const Eigen::MatrixXd v = info_inv * meat * info_inv;
  return v.diagonal().cwiseMax(0.0).cwiseSqrt();
}

double auc(std::span<const double> scores, std::span<const double> outcome) {
  if (scores.size() != outcome.size()) throw Error(ErrorKind::Validation, "scores and outcome differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Walk tie groups in ascending score order; a positive beats every
  // negative seen in earlier groups and ties half of those in its own.
  double wins = 0.0;
  double negatives_below = 0.0;
  double n_pos = 0.0;
  double n_neg = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    std::size_t end = k;
    double pos = 0.0;
    double neg = 0.0;
    while (end < order.size() && scores[order[end]] == scores[order[k]]) {
      (outcome[order[end]] > 0.5 ? pos : neg) += 1.0;
      ++end;
    }
    wins += pos * negatives_below + 0.5 * pos * neg;
    negatives_below += neg;
    n_pos += pos;
    n_neg += neg;
    k = end;
  }
  if (n_pos == 0.0 || n_neg == 0.0) throw Error(ErrorKind::Estimation, "AUC is undefined for a single-class outcome");
  return wins / (n_pos * n_neg);
}

const TermEstimate* RegressionResult::find(const std::string& term) const {
  for (const auto& t : terms)
    if (t.term == term) return &t;
  return nullptr;
}

PrunedDesign prune_and_expand(const Design& design) {
  const auto n = static_cast<std::size_t>(design.rows());
  std::vector<char> keep(n, 1);
  long dropped = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& f : design.factors) {
      std::vector<double> count(f.levels.size(), 0.0);
      std::vector<double> positives(f.levels.size(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        count[f.row_level[i]] += 1.0;
        positives[f.row_level[i]] += design.y(static_cast<Eigen::Index>(i));
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        const auto level = f.row_level[i];
        if (positives[level] == 0.0 || positives[level] == count[level]) {
          keep[i] = 0;
          ++dropped;
          changed = true;
        }
      }
    }
  }

  PrunedDesign out;
  out.dropped = dropped;
  out.columns = design.columns;
  out.n_base_columns = design.columns.size();

  std::vector<std::vector<std::ptrdiff_t>> dummy_col(design.factors.size());
  for (std::size_t fi = 0; fi < design.factors.size(); ++fi) {
    const auto& f = design.factors[fi];
    std::vector<char> used(f.levels.size(), 0);
    for (std::size_t i = 0; i < n; ++i)
      if (keep[i]) used[f.row_level[i]] = 1;
    dummy_col[fi].assign(f.levels.size(), -1);
    bool reference = true;
    for (std::size_t level = 0; level < f.levels.size(); ++level) {
      if (!used[level]) continue;
      if (reference) {
        reference = false;
        continue;
      }
      dummy_col[fi][level] = static_cast<std::ptrdiff_t>(out.columns.size());
      out.columns.push_back(f.name + "[" + f.levels[level] + "]");
    }
  }

  const auto kept = static_cast<Eigen::Index>(std::count(keep.begin(), keep.end(), 1));
  out.x = Eigen::MatrixXd::Zero(kept, static_cast<Eigen::Index>(out.columns.size()));
  out.y.resize(kept);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    const auto src = static_cast<Eigen::Index>(i);
    out.x.row(row).head(design.x.cols()) = design.x.row(src);
    for (std::size_t fi = 0; fi < design.factors.size(); ++fi) {
      const auto col = dummy_col[fi][design.factors[fi].row_level[i]];
      if (col >= 0) out.x(row, col) = 1.0;
    }
    out.y(row) = design.y(src);
    if (!design.cluster.empty()) out.cluster.push_back(design.cluster[i]);
    ++row;
  }
  return out;
}

namespace {

void check_binary_separation(const PrunedDesign& d) {
  for (std::size_t c = 0; c < d.n_base_columns; ++c) {
    const auto col = d.x.col(static_cast<Eigen::Index>(c));
    const bool binary = (col.array() == 0.0 || col.array() == 1.0).all();
    if (!binary || (col.array() == 1.0).all()) continue;
    for (double value : {0.0, 1.0}) {
      double count = 0.0;
      double positives = 0.0;
      for (Eigen::Index i = 0; i < col.size(); ++i) {
        if (col(i) != value) continue;
        count += 1.0;
        positives += d.y(i);
      }
      if (count > 0.0 && (positives == 0.0 || positives == count))
        throw Error(ErrorKind::Estimation, "column " + d.columns[c] + " perfectly predicts the outcome when it is " +
                                               (value == 0.0 ? "0" : "1"));
    }
  }
}

void check_rank(const PrunedDesign& d) {
  Eigen::MatrixXd scaled = d.x;
  std::vector<std::string> zero;
  for (Eigen::Index c = 0; c < scaled.cols(); ++c) {
    const double norm = scaled.col(c).norm();
    if (norm == 0.0)
      zero.push_back(d.columns[static_cast<std::size_t>(c)]);
    else
      scaled.col(c) /= norm;
  }
  auto join = [](const std::vector<std::string>& names) {
    std::string s;
    for (const auto& n : names) s += (s.empty() ? "" : ", ") + n;
    return s;
  };
  if (!zero.empty()) throw Error(ErrorKind::Estimation, "all-zero design columns: " + join(zero));

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-9);
  if (qr.rank() == scaled.cols()) return;
  std::vector<std::string> collinear;
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index k = qr.rank(); k < scaled.cols(); ++k) collinear.push_back(d.columns[static_cast<std::size_t>(perm(k))]);
  std::sort(collinear.begin(), collinear.end());
  throw Error(ErrorKind::Estimation, "rank-deficient design; collinear columns: " + join(collinear));
}

}  // namespace

RegressionResult fit_probit(const Design& design, const FitOptions& options) {
  const PrunedDesign d = prune_and_expand(design);
  if (d.y.size() == 0)
    throw Error(ErrorKind::Estimation, "no observations left after dropping fixed-effect groups with constant outcome");
  const double positives = d.y.sum();
  if (positives == 0.0 || positives == static_cast<double>(d.y.size()))
    throw Error(ErrorKind::Estimation, "outcome has no variation in the estimation sample");
  if (d.x.rows() < d.x.cols())
    throw Error(ErrorKind::Estimation, "fewer observations than parameters");
  check_binary_separation(d);
  check_rank(d);

  const NewtonResult fit = newton_probit(d.x, d.y, options.newton);
  const Eigen::VectorXd se = robust_se(d.x, d.y, fit.beta, options.cluster_by_region ? &d.cluster : nullptr);

  RegressionResult result;
  result.n_obs = static_cast<long>(d.y.size());
  result.n_dropped_separation = d.dropped;
  result.converged = fit.converged;
  result.iterations = fit.iterations;
  result.log_likelihood = fit.log_likelihood;
  result.n_fixed_effects = d.columns.size() - d.n_base_columns;
  for (std::size_t c = 0; c < d.n_base_columns; ++c) {
    const auto k = static_cast<Eigen::Index>(c);
    TermEstimate t;
    t.term = d.columns[c];
    t.estimate = fit.beta(k);
    t.robust_se = se(k);
    t.z = t.robust_se > 0.0 ? t.estimate / t.robust_se : 0.0;
    t.p_value = t.robust_se > 0.0 ? normal::two_sided_p(t.z) : 1.0;
    result.terms.push_back(std::move(t));
  }

  const Eigen::VectorXd eta = d.x * fit.beta;
  std::vector<double> prob(static_cast<std::size_t>(eta.size()));
  for (Eigen::Index i = 0; i < eta.size(); ++i) prob[static_cast<std::size_t>(i)] = normal::cdf(eta(i));
  result.auc = auc(prob, std::span<const double>(d.y.data(), static_cast<std::size_t>(d.y.size())));
  return result;
}

const char* significance_stars(double p_value) {
  if (p_value < 0.01) return "***";
  if (p_value < 0.05) return "**";
  if (p_value < 0.1) return "*";
  return "";
}

std::vector<Term> column_terms(Family family, int column) {
  static const std::array<std::array<Term, 3>, 2> sets{{{Term::WcExclD, Term::WcExclM, Term::WcOverlap},
                                                         {Term::ScExclD, Term::ScExclM, Term::ScOverlap}}};
  if (column < 1 || column > 5) throw Error(ErrorKind::Validation, "grid columns run from 1 to 5");
  std::vector<std::size_t> which;
  if (family != Family::Sc) which.push_back(0);
  if (family != Family::Wc) which.push_back(1);
  std::vector<Term> terms;
  if (column == 1) return terms;
  if (column == 5) {
    for (int k = 0; k < 3; ++k)
      for (auto w : which) terms.push_back(sets[w][static_cast<std::size_t>(k)]);
    return terms;
  }
  for (auto w : which) terms.push_back(sets[w][static_cast<std::size_t>(column - 2)]);
  return terms;
}

std::vector<GridCell> run_specification_grid(const TransitionTable& table, const CohesionTable& cohesion,
                                             const PresenceCube& cube, const GridOptions& options) {
  std::vector<GridCell> cells;
  for (auto family : options.families)
    for (auto outcome : {Outcome::Entry, Outcome::Exit})
      for (std::size_t p = 0; p < table.periods.size(); ++p)
        for (int column = 1; column <= 5; ++column) {
          GridCell cell;
          cell.family = family;
          cell.outcome = outcome;
          cell.period = p;
          cell.column = column;
          cell.spec.outcome = outcome;
          cell.spec.period = p;
          cell.spec.cohesion_terms = column_terms(family, column);
          cell.spec.include_mne_presence = true;
          cell.spec.industry_fe = options.industry_fe;
          cell.spec.region_fe = options.region_fe;
          try {
            cell.result = fit_probit(build_design(table, cohesion, cube, cell.spec), options.fit);
          } catch (const Error& e) {
            cell.error = e.what();
          }
          cells.push_back(std::move(cell));
        }
  return cells;
}

void write_results(const std::vector<GridCell>& cells, const TransitionTable& table,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  csv::write_row(out, {"family", "outcome", "period", "column", "term", "estimate", "robust_se", "p_value", "stars",
                       "auc", "n_obs", "n_dropped_separation", "converged", "log_likelihood", "error"});
  auto f = [](double v) { return csv::format_sig(v, 12); };
  for (const auto& cell : cells) {
    const csv::Row key{to_string(cell.family), to_string(cell.outcome), table.periods[cell.period].name,
                       std::to_string(cell.column)};
    if (!cell.result) {
      csv::Row row = key;
      row.insert(row.end(), {"", "NA", "NA", "NA", "", "NA", "NA", "NA", "NA", "NA", cell.error});
      csv::write_row(out, row);
      continue;
    }
    const auto& r = *cell.result;
    for (const auto& t : r.terms) {
      csv::Row row = key;
      row.insert(row.end(), {t.term, f(t.estimate), f(t.robust_se), f(t.p_value), significance_stars(t.p_value),
                             f(r.auc), std::to_string(r.n_obs), std::to_string(r.n_dropped_separation),
                             r.converged ? "1" : "0", f(r.log_likelihood), ""});
      csv::write_row(out, row);
    }
  }
}

}  // namespace mnec
