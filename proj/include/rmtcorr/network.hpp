#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmtcorr/ingest.hpp"

namespace rmtcorr {

/// Undirected simple graph over stocks: symmetric, no self loops.
struct AdjacencyMatrix {
  std::vector<std::string> tickers;
  BoolArray edges;

  Eigen::Index size() const { return edges.rows(); }
  std::int64_t edge_count() const;
  Eigen::Index node_count() const;  // nodes with degree >= 1
};

using Component = std::vector<Eigen::Index>;

struct ClusterScan {
  std::vector<double> thresholds;
  std::vector<std::int64_t> cluster_counts;
  std::vector<std::int64_t> node_counts;
  std::vector<std::int64_t> edge_counts;
};

struct ClusterReport {
  std::vector<std::string> members;
  std::int64_t edges = 0;
  std::map<std::string, std::int64_t> sector_counts;
  std::string dominant_sector;
  double purity = 0.0;  // share of the dominant sector

  std::size_t size() const { return members.size(); }
};

/// A_ij = (i != j) && group_ij > c_th. Throws ValidationError when `group`
/// is asymmetric beyond 1e-9.
AdjacencyMatrix threshold_adjacency(const Eigen::Ref<const Eigen::MatrixXd>& group, double c_th,
                                    std::vector<std::string> tickers = {});

/// Partition of all nodes into maximal connected sets. Members ascend and
/// components are ordered by their smallest member.
std::vector<Component> connected_components(const AdjacencyMatrix& a);

/// Number of components counted as clusters: those with >= 2 nodes, or all
/// of them when `count_singletons` is set.
std::int64_t count_clusters(const std::vector<Component>& components, bool count_singletons);

/// Cluster, node and edge counts at each threshold (which must ascend).
ClusterScan cluster_scan(const Eigen::Ref<const Eigen::MatrixXd>& group,
                         const std::vector<double>& thresholds, bool count_singletons = false);

/// `points` evenly spaced thresholds spanning the off-diagonal range of `group`.
std::vector<double> default_thresholds(const Eigen::Ref<const Eigen::MatrixXd>& group,
                                       int points = 200);

/// Threshold with the most clusters; the smallest one on ties.
double select_threshold(const ClusterScan& scan);

/// Per-cluster size, edges and sector make-up for every component that counts
/// as a cluster, in component order.
std::vector<ClusterReport> network_report(const AdjacencyMatrix& a, const SectorMap& sectors,
                                          bool count_singletons = false);

/// `ticker_a,ticker_b,weight`, one row per edge with i < j.
void write_edge_list(std::ostream& out, const AdjacencyMatrix& a,
                     const Eigen::Ref<const Eigen::MatrixXd>& weights);

/// `c_th,clusters,nodes,edges`
void write_cluster_scan(std::ostream& out, const ClusterScan& scan);

/// `cluster,size,edges,dominant_sector,purity,composition,members`; the last
/// two fields are `;`-separated lists.
void write_cluster_report(std::ostream& out, const std::vector<ClusterReport>& report);

}  // namespace rmtcorr
