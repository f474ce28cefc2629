#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mnec/ingest.hpp"

namespace mnec {

struct Edge {
  std::size_t to;
  double weight;
};

/// Undirected skill-relatedness graph. Only strictly positive weights are
/// stored; each adjacency list is sorted by neighbour index and the graph is
/// symmetric with an empty diagonal.
class RelatednessNetwork {
 public:
  RelatednessNetwork() = default;
  /// `adjacency[i]` must be sorted, symmetric and free of self-loops.
  RelatednessNetwork(std::vector<std::string> codes, std::vector<std::vector<Edge>> adjacency);

  /// Builds from a dense symmetric matrix, keeping entries > 0 off the diagonal.
  static RelatednessNetwork from_dense(std::vector<std::string> codes, const Eigen::MatrixXd& weights);

  std::size_t size() const { return codes_.size(); }
  std::size_t edge_count() const;
  const std::vector<std::string>& codes() const { return codes_; }
  const std::vector<Edge>& neighbors(std::size_t i) const { return adjacency_[i]; }
  /// Sum of incident edge weights, accumulated in neighbour order.
  double degree(std::size_t i) const { return degrees_[i]; }
  const std::vector<double>& degrees() const { return degrees_; }
  double weight(std::size_t i, std::size_t j) const;
  std::ptrdiff_t index_of(const std::string& code) const;
  Eigen::MatrixXd dense() const;

 private:
  std::vector<std::string> codes_;
  std::vector<std::vector<Edge>> adjacency_;
  std::vector<double> degrees_;
};

/// Mobility ratio of observed to expected flows under random mixing:
/// (F_ij / sum_j F_ij) / (sum_i F_ij / sum_ij F_ij), with the diagonal
/// removed first. Rows with no out-flow are all zero.
Eigen::MatrixXd mobility_ratio(const FlowMatrix& flows);

/// Symmetrises the mobility ratio by averaging with its transpose, maps the
/// average S onto (-1, 1) via (S - 1) / (S + 1) and keeps positive values.
RelatednessNetwork build_relatedness(const FlowMatrix& flows);

/// Re-expresses flows in the target scheme: every target pair reachable from
/// a source pair receives that pair's flow; collisions keep the maximum.
FlowMatrix convert_scheme(const FlowMatrix& flows, const Crosswalk& xwalk);

struct NodeAttribute {
  std::string industry;
  double mne_share = 0.0;
  bool no_employment = false;
};

/// MNE share of employment per network industry in `year`, summed over regions.
std::vector<NodeAttribute> node_attributes(const RelatednessNetwork& net, const EmploymentPanel& panel,
                                           int year);

/// Writes edges.csv (each undirected edge once, from < to) and nodes.csv.
void export_network(const RelatednessNetwork& net, const EmploymentPanel& panel, int year,
                    const std::filesystem::path& edges_path, const std::filesystem::path& nodes_path);

}  // namespace mnec
