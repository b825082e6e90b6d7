#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clusterface/clustering.hpp"
#include "clusterface/face_set_index.hpp"

namespace clusterface {

/// Identity assigned to a whole salient cluster: the mode of member identity
/// labels (ties broken by the lexicographically smallest identity), or the
/// synthetic "cluster:<index>" when no member is labeled.
struct ClusterLabel {
  int cluster_index = 0;
  std::string label;

  friend bool operator==(const ClusterLabel&, const ClusterLabel&) = default;
};

/// One cluster label per cluster, positioned by cluster_index.
/// identity_labels is a partial map set_id -> identity; unlabeled members are
/// excluded from the mode.
std::vector<ClusterLabel> label_clusters(
    const ClusteringResult& result,
    const std::map<std::string, std::string>& identity_labels);

struct Neighbor {
  std::string set_id;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Up to k nearest representatives by cosine distance ascending, excluding the
/// query itself and keeping only neighbors at distance strictly below beta.
/// Equidistant neighbors are ordered by set id.
std::vector<Neighbor> knn(const std::string& query, const FaceSetIndex& universe,
                          int k, double beta);

/// Same search restricted to the given candidate ids (all must exist in the
/// universe). Used for probe-against-gallery queries.
std::vector<Neighbor> knn_among(const std::string& query,
                                const FaceSetIndex& universe,
                                std::span<const std::string> candidates, int k,
                                double beta);

/// The neighborhood vote N{j, C_x}: counts j's qualifying k-nearest neighbors
/// per cluster and returns the cluster holding a strict plurality over every
/// other cluster's count. No qualifying neighbors, or a tie on the top count,
/// yields no vote (absence is a value, not an error).
std::optional<int> neighborhood_vote(const std::string& set_id,
                                     const ClusteringResult& result,
                                     const FaceSetIndex& universe, int k,
                                     double beta);

using ConstraintKey = std::pair<std::string, std::string>;
using ConstraintMap = std::map<ConstraintKey, ClusterLabel>;

/// Must-Associate entries: every ordered pair of distinct co-members of a
/// salient cluster maps to that cluster's label. Symmetric by construction.
ConstraintMap build_ma(const ClusteringResult& result,
                       std::span<const ClusterLabel> cluster_labels);

/// Neighbourhood-Associate entries: NA(i, j) = label(C_x) for every i in C_x
/// and every outside j whose neighborhood vote elects C_x. Not symmetric, and
/// disjoint from MA (in-cluster pairs are excluded).
ConstraintMap build_na(const ClusteringResult& result,
                       std::span<const ClusterLabel> cluster_labels,
                       const FaceSetIndex& universe, int k, double beta);

/// The two sparse constraint maps plus the k they were built with.
class ConstraintMatrices {
 public:
  ConstraintMatrices() = default;
  ConstraintMatrices(ConstraintMap ma, ConstraintMap na, int k);

  /// Label through which MA(i, j) holds, or nullptr when absent.
  const ClusterLabel* ma(const std::string& i, const std::string& j) const;
  /// Label through which NA(i, j) holds, or nullptr when absent.
  const ClusterLabel* na(const std::string& i, const std::string& j) const;

  const ConstraintMap& ma_entries() const noexcept { return ma_; }
  const ConstraintMap& na_entries() const noexcept { return na_; }
  int k() const noexcept { return k_; }

 private:
  ConstraintMap ma_;
  ConstraintMap na_;
  int k_ = 0;
};

/// Labels the clusters and builds both matrices in one pass.
ConstraintMatrices build_constraints(
    const ClusteringResult& result, const FaceSetIndex& universe,
    const std::map<std::string, std::string>& identity_labels, int k,
    double beta);

}  // namespace clusterface
