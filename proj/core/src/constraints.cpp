#include "clusterface/constraints.hpp"

#include <algorithm>

namespace clusterface {

std::vector<ClusterLabel> label_clusters(
    const ClusteringResult& result,
    const std::map<std::string, std::string>& identity_labels) {
  std::vector<ClusterLabel> out;
  out.reserve(result.clusters().size());
  for (const SalientCluster& cluster : result.clusters()) {
    std::map<std::string, int> counts;
    for (const std::string& id : cluster.member_set_ids) {
      auto it = identity_labels.find(id);
      if (it != identity_labels.end()) ++counts[it->second];
    }
    ClusterLabel label{cluster.cluster_index, {}};
    if (counts.empty()) {
      label.label = "cluster:" + std::to_string(cluster.cluster_index);
    } else {
      // Mode; counts is ordered by identity, so the first max is the
      // lexicographically smallest one.
      int best = 0;
      for (const auto& [identity, count] : counts) {
        if (count > best) {
          best = count;
          label.label = identity;
        }
      }
    }
    out.push_back(std::move(label));
  }
  return out;
}

std::vector<Neighbor> knn(const std::string& query, const FaceSetIndex& universe,
                          int k, double beta) {
  std::vector<std::string> all = universe.ids();
  return knn_among(query, universe, all, k, beta);
}

std::vector<Neighbor> knn_among(const std::string& query,
                                const FaceSetIndex& universe,
                                std::span<const std::string> candidates, int k,
                                double beta) {
  if (k < 1) {
    throw ValidationError("knn: k must be >= 1");
  }
  const Embedding& q = universe.representative(query);
  std::vector<Neighbor> qualifying;
  qualifying.reserve(candidates.size());
  for (const std::string& id : candidates) {
    if (id == query) continue;
    const double d = cosine_distance(q, universe.representative(id));
    if (d < beta) qualifying.push_back({id, d});
  }
  std::sort(qualifying.begin(), qualifying.end(),
            [](const Neighbor& x, const Neighbor& y) {
              if (x.distance != y.distance) return x.distance < y.distance;
              return x.set_id < y.set_id;
            });
  if (qualifying.size() > static_cast<std::size_t>(k)) {
    qualifying.resize(static_cast<std::size_t>(k));
  }
  return qualifying;
}

std::optional<int> neighborhood_vote(const std::string& set_id,
                                     const ClusteringResult& result,
                                     const FaceSetIndex& universe, int k,
                                     double beta) {
  const std::vector<Neighbor> neighbors = knn(set_id, universe, k, beta);
  if (neighbors.empty()) return std::nullopt;

  std::map<int, int> counts;
  for (const Neighbor& n : neighbors) {
    ++counts[result.cluster_index_of(n.set_id)];
  }
  int best_cluster = -1;
  int best_count = 0;
  bool tied = false;
  for (const auto& [cluster, count] : counts) {
    if (count > best_count) {
      best_count = count;
      best_cluster = cluster;
      tied = false;
    } else if (count == best_count) {
      tied = true;
    }
  }
  if (tied) return std::nullopt;
  return best_cluster;
}

ConstraintMap build_ma(const ClusteringResult& result,
                       std::span<const ClusterLabel> cluster_labels) {
  ConstraintMap ma;
  for (const SalientCluster& cluster : result.clusters()) {
    if (cluster.size() < 2) continue;
    const ClusterLabel& label = cluster_labels[static_cast<std::size_t>(cluster.cluster_index)];
    for (const std::string& i : cluster.member_set_ids) {
      for (const std::string& j : cluster.member_set_ids) {
        if (i == j) continue;
        ma.emplace(ConstraintKey{i, j}, label);
      }
    }
  }
  return ma;
}

ConstraintMap build_na(const ClusteringResult& result,
                       std::span<const ClusterLabel> cluster_labels,
                       const FaceSetIndex& universe, int k, double beta) {
  ConstraintMap na;
  for (const FaceSet& s : universe.sets()) {
    const std::string& j = s.set_id();
    const std::optional<int> vote = neighborhood_vote(j, result, universe, k, beta);
    if (!vote.has_value()) continue;
    if (result.cluster_index_of(j) == *vote) continue;  // MA governs in-cluster pairs
    const SalientCluster& cluster = result.clusters()[static_cast<std::size_t>(*vote)];
    const ClusterLabel& label = cluster_labels[static_cast<std::size_t>(*vote)];
    for (const std::string& i : cluster.member_set_ids) {
      na.emplace(ConstraintKey{i, j}, label);
    }
  }
  return na;
}

ConstraintMatrices::ConstraintMatrices(ConstraintMap ma, ConstraintMap na, int k)
    : ma_(std::move(ma)), na_(std::move(na)), k_(k) {
  if (k_ < 1) {
    throw ValidationError("constraint matrices: k must be >= 1");
  }
}

const ClusterLabel* ConstraintMatrices::ma(const std::string& i,
                                           const std::string& j) const {
  auto it = ma_.find(ConstraintKey{i, j});
  return it == ma_.end() ? nullptr : &it->second;
}

const ClusterLabel* ConstraintMatrices::na(const std::string& i,
                                           const std::string& j) const {
  auto it = na_.find(ConstraintKey{i, j});
  return it == na_.end() ? nullptr : &it->second;
}

ConstraintMatrices build_constraints(
    const ClusteringResult& result, const FaceSetIndex& universe,
    const std::map<std::string, std::string>& identity_labels, int k,
    double beta) {
  const std::vector<ClusterLabel> labels = label_clusters(result, identity_labels);
  return ConstraintMatrices(build_ma(result, labels),
                            build_na(result, labels, universe, k, beta), k);
}

}  // namespace clusterface
