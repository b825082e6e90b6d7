#include "clusterface/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <utility>

#include "clusterface/detail/parallel.hpp"

namespace clusterface {

namespace {

// Candidate pair in dendrogram-id space, oriented so that the cluster with the
// lexicographically smaller min member id comes first.
struct HeapEntry {
  double distance;
  std::int32_t a;
  std::int32_t b;
};

// Min-heap order on (distance, min id of a, min id of b). Total over live
// pairs, which makes the pop sequence independent of push order.
struct EntryGreater {
  const std::vector<std::string>* min_ids;

  bool operator()(const HeapEntry& x, const HeapEntry& y) const {
    if (x.distance != y.distance) return x.distance > y.distance;
    const std::string& xa = (*min_ids)[static_cast<std::size_t>(x.a)];
    const std::string& ya = (*min_ids)[static_cast<std::size_t>(y.a)];
    if (xa != ya) return xa > ya;
    return (*min_ids)[static_cast<std::size_t>(x.b)] >
           (*min_ids)[static_cast<std::size_t>(y.b)];
  }
};

}  // namespace

ClusteringResult::ClusteringResult(std::vector<SalientCluster> clusters,
                                   std::vector<MergeEvent> merge_log,
                                   PipelineConfig config,
                                   std::size_t distance_evaluations)
    : clusters_(std::move(clusters)),
      merge_log_(std::move(merge_log)),
      config_(config),
      distance_evaluations_(distance_evaluations) {
  for (std::size_t c = 0; c < clusters_.size(); ++c) {
    const SalientCluster& cluster = clusters_[c];
    if (cluster.member_set_ids.empty()) {
      throw ValidationError("clustering result contains an empty cluster");
    }
    for (const std::string& id : cluster.member_set_ids) {
      if (!membership_.emplace(id, static_cast<int>(c)).second) {
        throw ValidationError("set id '" + id + "' appears in more than one cluster");
      }
    }
  }
}

bool ClusteringResult::contains(const std::string& set_id) const {
  return membership_.count(set_id) != 0;
}

int ClusteringResult::cluster_index_of(const std::string& set_id) const {
  auto it = membership_.find(set_id);
  if (it == membership_.end()) {
    throw ValidationError("set id '" + set_id + "' is not part of the clustering");
  }
  return it->second;
}

const SalientCluster& ClusteringResult::cluster_containing(const std::string& set_id) const {
  return clusters_[static_cast<std::size_t>(cluster_index_of(set_id))];
}

ClusteringResult run_salient_clustering(const FaceSetIndex& sets,
                                        const PipelineConfig& config,
                                        std::size_t thread_count) {
  // The threshold is taken as given (a zero-width beta - gamma band is a
  // legitimate degenerate run); full config validation happens at the CLI
  // and sweep boundaries.
  if (!std::isfinite(config.salient_threshold())) {
    throw ValidationError("clustering: beta - gamma must be finite");
  }
  if (sets.empty()) {
    throw ValidationError("clustering requires at least one face set");
  }
  const std::size_t n = sets.size();
  const std::size_t dim = sets.dimension();
  const double threshold = config.salient_threshold();
  const std::size_t max_nodes = 2 * n - 1;

  std::vector<std::vector<double>> sums(max_nodes);
  std::vector<std::vector<double>> centroids(max_nodes);
  std::vector<std::vector<std::int32_t>> members(max_nodes);
  std::vector<std::string> min_ids(max_nodes);
  std::vector<int> counts(max_nodes, 0);
  std::vector<char> alive(max_nodes, 0);

  for (std::size_t i = 0; i < n; ++i) {
    const FaceSet& s = sets.sets()[i];
    const auto rep = s.representative().values();
    sums[i].assign(rep.begin(), rep.end());
    centroids[i] = sums[i];
    members[i] = {static_cast<std::int32_t>(i)};
    min_ids[i] = s.set_id();
    counts[i] = 1;
    alive[i] = 1;
  }

  std::size_t evaluations = 0;

  // All initial pairs in a fixed order; only the distance values are computed
  // in parallel, so the run is bit-identical for any thread_count.
  std::vector<HeapEntry> initial;
  initial.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto a = static_cast<std::int32_t>(i);
      const auto b = static_cast<std::int32_t>(j);
      if (min_ids[i] < min_ids[j]) {
        initial.push_back({0.0, a, b});
      } else {
        initial.push_back({0.0, b, a});
      }
    }
  }
  detail::parallel_for(initial.size(), thread_count,
                       [&](std::size_t begin, std::size_t end) {
                         for (std::size_t t = begin; t < end; ++t) {
                           HeapEntry& e = initial[t];
                           e.distance = detail::cosine_distance_raw(
                               centroids[static_cast<std::size_t>(e.a)],
                               centroids[static_cast<std::size_t>(e.b)]);
                         }
                       });
  evaluations += initial.size();

  EntryGreater order{&min_ids};
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, EntryGreater> heap(
      order, std::move(initial));

  std::vector<std::int32_t> active;
  active.reserve(n);
  for (std::size_t i = 0; i < n; ++i) active.push_back(static_cast<std::int32_t>(i));

  std::vector<MergeEvent> merge_log;
  std::int32_t next_id = static_cast<std::int32_t>(n);

  while (!heap.empty()) {
    const HeapEntry top = heap.top();
    if (!alive[static_cast<std::size_t>(top.a)] ||
        !alive[static_cast<std::size_t>(top.b)]) {
      heap.pop();  // stale entry referencing a retired cluster
      continue;
    }
    if (!(top.distance < threshold)) break;
    heap.pop();

    const std::size_t a = static_cast<std::size_t>(top.a);
    const std::size_t b = static_cast<std::size_t>(top.b);
    const std::size_t merged = static_cast<std::size_t>(next_id++);

    counts[merged] = counts[a] + counts[b];
    sums[merged].resize(dim);
    centroids[merged].resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      sums[merged][d] = sums[a][d] + sums[b][d];
      centroids[merged][d] = sums[merged][d] / counts[merged];
    }
    members[merged] = members[a];
    members[merged].insert(members[merged].end(), members[b].begin(), members[b].end());
    min_ids[merged] = min_ids[a];  // left side owns the smaller min id

    alive[a] = 0;
    alive[b] = 0;
    std::erase_if(active, [&](std::int32_t c) { return c == top.a || c == top.b; });

    merge_log.push_back({static_cast<int>(merge_log.size()) + 1, top.a, top.b,
                         top.distance, static_cast<std::int32_t>(merged)});

    for (std::int32_t c : active) {
      const double d = detail::cosine_distance_raw(
          centroids[static_cast<std::size_t>(c)], centroids[merged]);
      ++evaluations;
      if (min_ids[static_cast<std::size_t>(c)] < min_ids[merged]) {
        heap.push({d, c, static_cast<std::int32_t>(merged)});
      } else {
        heap.push({d, static_cast<std::int32_t>(merged), c});
      }
    }
    active.push_back(static_cast<std::int32_t>(merged));
    alive[merged] = 1;
  }

  std::vector<SalientCluster> clusters;
  clusters.reserve(active.size());
  for (std::int32_t c : active) {
    SalientCluster cluster;
    cluster.member_set_ids.reserve(members[static_cast<std::size_t>(c)].size());
    for (std::int32_t pos : members[static_cast<std::size_t>(c)]) {
      cluster.member_set_ids.push_back(sets.sets()[static_cast<std::size_t>(pos)].set_id());
    }
    std::sort(cluster.member_set_ids.begin(), cluster.member_set_ids.end());
    cluster.centroid = centroids[static_cast<std::size_t>(c)];
    clusters.push_back(std::move(cluster));
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const SalientCluster& x, const SalientCluster& y) {
              return x.member_set_ids.front() < y.member_set_ids.front();
            });
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    clusters[c].cluster_index = static_cast<int>(c);
  }

  return ClusteringResult(std::move(clusters), std::move(merge_log), config,
                          evaluations);
}

bool verify_termination(const ClusteringResult& result) {
  const double threshold = result.config().salient_threshold();
  for (const MergeEvent& e : result.merge_log()) {
    if (!(e.distance < threshold)) return false;
  }
  const auto& clusters = result.clusters();
  for (const SalientCluster& c : clusters) {
    if (detail::norm(c.centroid) < detail::kDegenerateNorm) return false;
  }
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    for (std::size_t j = i + 1; j < clusters.size(); ++j) {
      if (centroid_distance(clusters[i], clusters[j]) < threshold) return false;
    }
  }
  return true;
}

std::size_t count_distance_evaluations(const ClusteringResult& result) {
  return result.distance_evaluations();
}

}  // namespace clusterface
