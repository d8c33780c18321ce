#include "rmtcorr/network.hpp"

#include <algorithm>
#include <numeric>

#include "format.hpp"
#include "rmtcorr/correlation.hpp"
#include "rmtcorr/errors.hpp"

namespace rmtcorr {

namespace {

/// Disjoint-set forest with path halving and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(Eigen::Index n) : parent_(static_cast<std::size_t>(n)), size_(parent_.size(), 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

std::vector<std::string> default_labels(Eigen::Index n) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

}  // namespace

std::int64_t AdjacencyMatrix::edge_count() const { return edges.count() / 2; }

Eigen::Index AdjacencyMatrix::node_count() const { return edges.rowwise().any().count(); }

AdjacencyMatrix threshold_adjacency(const Eigen::Ref<const Eigen::MatrixXd>& group, double c_th,
                                    std::vector<std::string> tickers) {
  check_symmetric(group, 1e-9, "group correlation matrix");
  const Eigen::Index n = group.rows();
  if (tickers.empty()) tickers = default_labels(n);
  if (static_cast<Eigen::Index>(tickers.size()) != n) {
    throw ValidationError("ticker count does not match matrix size");
  }
  AdjacencyMatrix a;
  a.tickers = std::move(tickers);
  // Decide on the upper triangle and mirror, so tiny asymmetries cannot
  // produce a one-directional edge.
  a.edges = BoolArray::Constant(n, n, false);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const bool e = group(i, j) > c_th;
      a.edges(i, j) = e;
      a.edges(j, i) = e;
    }
  }
  return a;
}

std::vector<Component> connected_components(const AdjacencyMatrix& a) {
  const Eigen::Index n = a.size();
  DisjointSets sets(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (a.edges(i, j)) sets.unite(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  // Scanning nodes in ascending order creates components in order of their
  // smallest member and fills each one in ascending order.
  std::vector<Component> out;
  std::vector<std::ptrdiff_t> slot(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t root = sets.find(static_cast<std::size_t>(i));
    if (slot[root] < 0) {
      slot[root] = static_cast<std::ptrdiff_t>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot[root])].push_back(i);
  }
  return out;
}

std::int64_t count_clusters(const std::vector<Component>& components, bool count_singletons) {
  return std::count_if(components.begin(), components.end(), [&](const Component& c) {
    return count_singletons || c.size() >= 2;
  });
}

ClusterScan cluster_scan(const Eigen::Ref<const Eigen::MatrixXd>& group,
                         const std::vector<double>& thresholds, bool count_singletons) {
  if (thresholds.empty()) throw RangeError("cluster scan needs at least one threshold");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw RangeError("cluster scan thresholds must be ascending");
  }
  ClusterScan scan;
  scan.thresholds = thresholds;
  for (double c : thresholds) {
    const AdjacencyMatrix a = threshold_adjacency(group, c);
    scan.cluster_counts.push_back(count_clusters(connected_components(a), count_singletons));
    scan.node_counts.push_back(a.node_count());
    scan.edge_counts.push_back(a.edge_count());
  }
  return scan;
}

std::vector<double> default_thresholds(const Eigen::Ref<const Eigen::MatrixXd>& group,
                                       int points) {
  if (points < 1) throw RangeError("threshold grid needs at least one point");
  if (group.rows() < 2) throw RangeError("threshold grid needs N >= 2");
  const Eigen::VectorXd off = upper_triangle(group);
  const double lo = off.minCoeff();
  const double hi = off.maxCoeff();
  if (points == 1 || lo == hi) return {lo};
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(points, lo, hi);
  return {grid.data(), grid.data() + grid.size()};
}

double select_threshold(const ClusterScan& scan) {
  if (scan.thresholds.empty()) throw RangeError("empty cluster scan");
  // max_element returns the first maximum, i.e. the smallest threshold.
  const auto best = std::max_element(scan.cluster_counts.begin(), scan.cluster_counts.end());
  return scan.thresholds[static_cast<std::size_t>(best - scan.cluster_counts.begin())];
}

std::vector<ClusterReport> network_report(const AdjacencyMatrix& a, const SectorMap& sectors,
                                          bool count_singletons) {
  std::vector<ClusterReport> out;
  for (const Component& c : connected_components(a)) {
    if (!count_singletons && c.size() < 2) continue;
    ClusterReport r;
    for (std::size_t x = 0; x < c.size(); ++x) {
      const auto& ticker = a.tickers[static_cast<std::size_t>(c[x])];
      r.members.push_back(ticker);
      ++r.sector_counts[sectors.sector_of(ticker)];
      for (std::size_t y = x + 1; y < c.size(); ++y) r.edges += a.edges(c[x], c[y]) ? 1 : 0;
    }
    // std::map iterates sectors alphabetically, so ties go to the first name.
    const auto dominant = std::max_element(
        r.sector_counts.begin(), r.sector_counts.end(),
        [](const auto& lhs, const auto& rhs) { return lhs.second < rhs.second; });
    r.dominant_sector = dominant->first;
    r.purity = static_cast<double>(dominant->second) / static_cast<double>(c.size());
    out.push_back(std::move(r));
  }
  return out;
}

void write_edge_list(std::ostream& out, const AdjacencyMatrix& a,
                     const Eigen::Ref<const Eigen::MatrixXd>& weights) {
  out << "ticker_a,ticker_b,weight\n";
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = i + 1; j < a.size(); ++j) {
      if (!a.edges(i, j)) continue;
      out << a.tickers[static_cast<std::size_t>(i)] << ',' << a.tickers[static_cast<std::size_t>(j)]
          << ',' << detail::num(weights(i, j)) << '\n';
    }
  }
}

void write_cluster_scan(std::ostream& out, const ClusterScan& scan) {
  out << "c_th,clusters,nodes,edges\n";
  for (std::size_t k = 0; k < scan.thresholds.size(); ++k) {
    out << detail::num(scan.thresholds[k]) << ',' << scan.cluster_counts[k] << ','
        << scan.node_counts[k] << ',' << scan.edge_counts[k] << '\n';
  }
}

void write_cluster_report(std::ostream& out, const std::vector<ClusterReport>& report) {
  out << "cluster,size,edges,dominant_sector,purity,composition,members\n";
  for (std::size_t k = 0; k < report.size(); ++k) {
    const auto& r = report[k];
    out << k << ',' << r.size() << ',' << r.edges << ',' << r.dominant_sector << ','
        << detail::num(r.purity) << ',';
    bool first = true;
    for (const auto& [sector, count] : r.sector_counts) {
      out << (first ? "" : ";") << sector << ':' << count;
      first = false;
    }
    out << ',';
    for (std::size_t m = 0; m < r.members.size(); ++m) out << (m ? ";" : "") << r.members[m];
    out << '\n';
  }
}

}  // namespace rmtcorr
