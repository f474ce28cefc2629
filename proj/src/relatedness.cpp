#include "mnec/relatedness.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include "mnec/csv.hpp"

namespace mnec {

RelatednessNetwork::RelatednessNetwork(std::vector<std::string> codes,
                                       std::vector<std::vector<Edge>> adjacency)
    : codes_(std::move(codes)), adjacency_(std::move(adjacency)) {
  if (adjacency_.size() != codes_.size())
    throw Error(ErrorKind::Validation, "adjacency size does not match code list");
  degrees_.assign(codes_.size(), 0.0);
  for (std::size_t i = 0; i < adjacency_.size(); ++i) {
    double d = 0.0;
    for (const auto& e : adjacency_[i]) d += e.weight;
    degrees_[i] = d;
  }
}

RelatednessNetwork RelatednessNetwork::from_dense(std::vector<std::string> codes,
                                                  const Eigen::MatrixXd& weights) {
  const auto n = static_cast<std::size_t>(weights.rows());
  std::vector<std::vector<Edge>> adjacency(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double w = weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (i != j && w > 0.0) adjacency[i].push_back({j, w});
    }
  return RelatednessNetwork(std::move(codes), std::move(adjacency));
}

std::size_t RelatednessNetwork::edge_count() const {
  std::size_t twice = 0;
  for (const auto& list : adjacency_) twice += list.size();
  return twice / 2;
}

double RelatednessNetwork::weight(std::size_t i, std::size_t j) const {
  const auto& list = adjacency_[i];
  auto it = std::lower_bound(list.begin(), list.end(), j,
                             [](const Edge& e, std::size_t target) { return e.to < target; });
  return (it != list.end() && it->to == j) ? it->weight : 0.0;
}

std::ptrdiff_t RelatednessNetwork::index_of(const std::string& code) const {
  auto it = std::find(codes_.begin(), codes_.end(), code);
  return it == codes_.end() ? -1 : it - codes_.begin();
}

Eigen::MatrixXd RelatednessNetwork::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < size(); ++i)
    for (const auto& e : adjacency_[i])
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e.to)) = e.weight;
  return out;
}

Eigen::MatrixXd mobility_ratio(const FlowMatrix& flows) {
  Eigen::MatrixXd f = flows.counts;
  f.diagonal().setZero();
  const double total = f.sum();
  const Eigen::VectorXd out_flow = f.rowwise().sum();
  const Eigen::VectorXd in_flow = f.colwise().sum().transpose();

  const auto n = f.rows();
  Eigen::MatrixXd ratio = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out_flow(i) <= 0.0) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || in_flow(j) <= 0.0) continue;
      ratio(i, j) = (f(i, j) / out_flow(i)) / (in_flow(j) / total);
    }
  }
  return ratio;
}

RelatednessNetwork build_relatedness(const FlowMatrix& flows) {
  const auto n = flows.size();
  if (n < 2) throw Error(ErrorKind::Degenerate, "relatedness needs at least two industries");
  if (static_cast<std::size_t>(flows.counts.rows()) != n || static_cast<std::size_t>(flows.counts.cols()) != n)
    throw Error(ErrorKind::Validation, "flow matrix dimension does not match its code list");
  if ((flows.counts.array() < 0.0).any())
    throw Error(ErrorKind::Validation, "flow matrix has negative counts");
  Eigen::MatrixXd offdiag = flows.counts;
  offdiag.diagonal().setZero();
  if (!(offdiag.sum() > 0.0))
    throw Error(ErrorKind::Degenerate, "flow matrix has no off-diagonal flow");

  const Eigen::MatrixXd ratio = mobility_ratio(flows);

  // Upper triangle first, then mirrored, so symmetry is exact.
  std::vector<std::vector<Edge>> adjacency(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      const double s = 0.5 * (ratio(ii, jj) + ratio(jj, ii));
      const double w = (s - 1.0) / (s + 1.0);
      if (w > 0.0) {
        adjacency[i].push_back({j, w});
        adjacency[j].push_back({i, w});
      }
    }
  }
  for (auto& list : adjacency)
    std::sort(list.begin(), list.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
  return RelatednessNetwork(flows.codes, std::move(adjacency));
}

FlowMatrix convert_scheme(const FlowMatrix& flows, const Crosswalk& xwalk) {
  check_coverage(xwalk, flows);

  FlowMatrix out;
  out.scheme = Scheme::Target;
  std::unordered_map<std::string, std::size_t> target_index;
  std::vector<std::vector<std::size_t>> targets(flows.size());
  for (std::size_t i = 0; i < flows.size(); ++i) {
    for (const auto& p : xwalk.pairs) {
      if (p.source != flows.codes[i]) continue;
      auto [it, inserted] = target_index.try_emplace(p.target, out.codes.size());
      if (inserted) out.codes.push_back(p.target);
      targets[i].push_back(it->second);
    }
  }

  const auto m = static_cast<Eigen::Index>(out.codes.size());
  out.counts = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t i = 0; i < flows.size(); ++i)
    for (std::size_t j = 0; j < flows.size(); ++j) {
      const double x = flows.counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      for (auto a : targets[i])
        for (auto c : targets[j]) {
          double& cell = out.counts(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
          cell = std::max(cell, x);
        }
    }
  return out;
}

std::vector<NodeAttribute> node_attributes(const RelatednessNetwork& net, const EmploymentPanel& panel,
                                           int year) {
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> totals;  // dom, mne
  bool year_seen = false;
  for (const auto& r : panel.records) {
    if (r.year != year) continue;
    year_seen = true;
    auto& t = totals[r.industry];
    t.first += r.emp_dom;
    t.second += r.emp_mne;
  }
  if (!year_seen) throw Error(ErrorKind::Validation, "year " + std::to_string(year) + " is not in the panel");

  std::vector<NodeAttribute> nodes;
  nodes.reserve(net.size());
  for (const auto& code : net.codes()) {
    NodeAttribute node{code, 0.0, true};
    if (auto it = totals.find(code); it != totals.end()) {
      const auto total = it->second.first + it->second.second;
      if (total > 0) {
        node.mne_share = static_cast<double>(it->second.second) / static_cast<double>(total);
        node.no_employment = false;
      }
    }
    nodes.push_back(std::move(node));
  }
  return nodes;
}

void export_network(const RelatednessNetwork& net, const EmploymentPanel& panel, int year,
                    const std::filesystem::path& edges_path, const std::filesystem::path& nodes_path) {
  const auto nodes = node_attributes(net, panel, year);

  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (std::size_t i = 0; i < net.size(); ++i)
    for (const auto& e : net.neighbors(i)) {
      const auto& a = net.codes()[i];
      const auto& b = net.codes()[e.to];
      if (a < b) edges.emplace_back(a, b, e.weight);
    }
  std::sort(edges.begin(), edges.end());

  std::ofstream edges_out(edges_path, std::ios::binary);
  if (!edges_out) throw Error(ErrorKind::Io, "cannot write " + edges_path.string());
  csv::write_row(edges_out, {"from", "to", "weight"});
  for (const auto& [a, b, w] : edges) csv::write_row(edges_out, {a, b, csv::format_sig(w, 12)});

  std::ofstream nodes_out(nodes_path, std::ios::binary);
  if (!nodes_out) throw Error(ErrorKind::Io, "cannot write " + nodes_path.string());
  csv::write_row(nodes_out, {"industry", "mne_share", "no_employment"});
  for (const auto& n : nodes)
    csv::write_row(nodes_out, {n.industry, csv::format_sig(n.mne_share, 12), n.no_employment ? "1" : "0"});
}

}  // namespace mnec
