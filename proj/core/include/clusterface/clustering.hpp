#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "clusterface/embedding.hpp"
#include "clusterface/face_set_index.hpp"

namespace clusterface {

/// One agglomeration step. Cluster ids live in dendrogram space: input sets
/// get ids 0..n-1 in input order, the merge at iteration t creates id n+t-1.
/// `left` is always the side whose smallest member set id is lexicographically
/// smaller. The recorded distance was the global minimum at its iteration;
/// distances need not be monotone across iterations (centroid drift).
struct MergeEvent {
  int iteration = 0;  // 1-based
  int left = 0;
  int right = 0;
  double distance = 0.0;
  int result = 0;

  friend bool operator==(const MergeEvent&, const MergeEvent&) = default;
};

/// Final clusters (a partition of the input set ids), the full merge log and
/// the config snapshot. Clusters are ordered by their smallest member set id
/// and cluster_index equals the position in that order.
class ClusteringResult {
 public:
  ClusteringResult(std::vector<SalientCluster> clusters,
                   std::vector<MergeEvent> merge_log, PipelineConfig config,
                   std::size_t distance_evaluations);

  const std::vector<SalientCluster>& clusters() const noexcept { return clusters_; }
  const std::vector<MergeEvent>& merge_log() const noexcept { return merge_log_; }
  const PipelineConfig& config() const noexcept { return config_; }
  std::size_t distance_evaluations() const noexcept { return distance_evaluations_; }

  bool contains(const std::string& set_id) const;
  int cluster_index_of(const std::string& set_id) const;
  const SalientCluster& cluster_containing(const std::string& set_id) const;

 private:
  std::vector<SalientCluster> clusters_;
  std::vector<MergeEvent> merge_log_;
  PipelineConfig config_;
  std::size_t distance_evaluations_ = 0;
  std::map<std::string, int> membership_;
};

/// Bottom-up agglomeration over set representatives: repeatedly merges the
/// globally closest cluster pair (by centroid cosine distance) while that
/// minimum is strictly below beta - gamma. Ties on the minimum are broken by
/// the lexicographically smallest (min set id of A, min set id of B) pair, so
/// the run is fully deterministic, and bit-identical for any thread_count
/// (parallelism only spreads the initial all-pairs distance computation).
ClusteringResult run_salient_clustering(const FaceSetIndex& sets,
                                        const PipelineConfig& config,
                                        std::size_t thread_count = 0);

/// Post-hoc validation of the loop guard: true iff every recorded merge
/// distance is < beta - gamma and every pairwise final centroid distance is
/// >= beta - gamma (degenerate centroids count as failure).
bool verify_termination(const ClusteringResult& result);

/// Total centroid-distance evaluations performed by the instrumented run.
std::size_t count_distance_evaluations(const ClusteringResult& result);

}  // namespace clusterface
