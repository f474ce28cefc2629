#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mnec/cohesion.hpp"
#include "mnec/error.hpp"
#include "mnec/panel.hpp"

namespace mnec {

enum class Outcome { Entry, Exit };

/// The six ownership-partitioned cohesion regressors.
enum class Term { WcExclD, WcExclM, WcOverlap, ScExclD, ScExclM, ScOverlap };

const char* to_string(Outcome o);
const char* to_string(Term t);

struct RegressionSpec {
  Outcome outcome = Outcome::Entry;
  std::size_t period = 0;  // index into the transition table's periods
  std::vector<Term> cohesion_terms;
  bool include_mne_presence = true;
  bool industry_fe = true;
  bool region_fe = true;
};

/// Categorical regressor expanded into dummies only after separated groups
/// have been pruned. `levels` is sorted; the first retained level is the
/// reference.
struct Factor {
  std::string name;
  std::vector<std::string> levels;
  std::vector<std::size_t> row_level;
};

struct Design {
  std::vector<std::string> columns;  // "intercept" first
  Eigen::MatrixXd x;                 // rows x columns, fixed effects excluded
  Eigen::VectorXd y;
  std::vector<Factor> factors;
  std::vector<std::size_t> cluster;  // region index per row

  Eigen::Index rows() const { return x.rows(); }
};

/// Restricts rows to the outcome's sample for the spec's period and lays out
/// intercept, cohesion terms at the base year and X_M(base).
Design build_design(const TransitionTable& table, const CohesionTable& cohesion, const PresenceCube& cube,
                    const RegressionSpec& spec);

// Probit building blocks over a fully materialised design matrix.
double probit_loglik(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);
Eigen::VectorXd probit_score(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);
/// Per-observation score contributions, one row per observation.
Eigen::MatrixXd probit_scores(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);
/// Hessian of the log-likelihood (negative definite at full rank).
Eigen::MatrixXd probit_hessian(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);

struct NewtonOptions {
  int max_iterations = 100;
  double score_tolerance = 1e-8;
  double relative_loglik_tolerance = 1e-10;
};

struct NewtonResult {
  Eigen::VectorXd beta;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> trace;  // log-likelihood after each accepted step, start included
};

/// Newton-Raphson with step halving, starting from beta = 0.
NewtonResult newton_probit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const NewtonOptions& options = {});

/// Huber-White sandwich H^-1 (sum s s') H^-1. With `clusters`, scores are
/// summed within each cluster first. Throws Error(Estimation) if H is singular.
Eigen::VectorXd robust_se(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                          const std::vector<std::size_t>* clusters = nullptr);

/// Mann-Whitney AUC with ties counted as one half. Throws Error(Estimation)
/// when the outcome has a single class.
double auc(std::span<const double> scores, std::span<const double> outcome);

struct TermEstimate {
  std::string term;
  double estimate = 0.0;
  double robust_se = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};

struct RegressionResult {
  std::vector<TermEstimate> terms;  // non-FE columns, design order
  double auc = 0.5;
  long n_obs = 0;
  long n_dropped_separation = 0;
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;
  std::size_t n_fixed_effects = 0;

  const TermEstimate* find(const std::string& term) const;
};

struct FitOptions {
  NewtonOptions newton;
  bool cluster_by_region = false;
};

/// Result of removing fixed-effect groups whose outcome never varies.
struct PrunedDesign {
  Eigen::MatrixXd x;  // non-FE columns followed by dummies
  Eigen::VectorXd y;
  std::vector<std::string> columns;
  std::size_t n_base_columns = 0;
  std::vector<std::size_t> cluster;
  long dropped = 0;
};

PrunedDesign prune_and_expand(const Design& design);

/// Fits the probit with fixed-effect dummies. Separated fixed-effect groups
/// are dropped first; a binary regressor that separates the outcome or a rank
/// deficient design throws Error(Estimation). Non-convergence is reported in
/// the result.
RegressionResult fit_probit(const Design& design, const FitOptions& options = {});

const char* significance_stars(double p_value);

// Specification grid -----------------------------------------------------

enum class Family { Wc, Sc, Combined };
const char* to_string(Family f);

struct GridOptions {
  std::vector<Family> families{Family::Wc, Family::Sc, Family::Combined};
  bool industry_fe = true;
  bool region_fe = true;
  FitOptions fit;
};

struct GridCell {
  Family family = Family::Wc;
  Outcome outcome = Outcome::Entry;
  std::size_t period = 0;
  int column = 1;  // 1: X_M only, 2-4: one ownership set each, 5: all sets
  RegressionSpec spec;
  std::optional<RegressionResult> result;
  std::string error;
};

/// The terms of column 1..5 for a measure family.
std::vector<Term> column_terms(Family family, int column);

/// Every family x outcome x period x column combination. Failures are
/// recorded per cell.
std::vector<GridCell> run_specification_grid(const TransitionTable& table, const CohesionTable& cohesion,
                                             const PresenceCube& cube, const GridOptions& options = {});

void write_results(const std::vector<GridCell>& cells, const TransitionTable& table,
                   const std::filesystem::path& path);

}  // namespace mnec
