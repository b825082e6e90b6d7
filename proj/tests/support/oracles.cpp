#include "support/oracles.hpp"

#include <algorithm>
#include <set>

namespace clusterface::testing {

namespace {

struct OracleCluster {
  int dendro_id = 0;
  std::vector<std::string> member_ids;  // sorted
};

std::vector<double> oracle_centroid(const OracleCluster& cluster,
                                    const FaceSetIndex& sets) {
  std::vector<Embedding> reps;
  reps.reserve(cluster.member_ids.size());
  for (const std::string& id : cluster.member_ids) {
    reps.push_back(sets.representative(id));
  }
  return centroid(reps);
}

}  // namespace

OracleClustering naive_hac(const FaceSetIndex& sets, double threshold) {
  std::vector<OracleCluster> clusters;
  clusters.reserve(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    clusters.push_back({static_cast<int>(i), {sets.sets()[i].set_id()}});
  }

  std::vector<MergeEvent> log;
  int next_id = static_cast<int>(sets.size());
  while (clusters.size() > 1) {
    // Recompute every centroid and every pairwise distance from scratch.
    std::vector<std::vector<double>> centroids;
    centroids.reserve(clusters.size());
    for (const OracleCluster& c : clusters) {
      centroids.push_back(oracle_centroid(c, sets));
    }

    bool found = false;
    double best = 0.0;
    std::size_t best_x = 0, best_y = 0;
    for (std::size_t x = 0; x < clusters.size(); ++x) {
      for (std::size_t y = 0; y < clusters.size(); ++y) {
        if (x == y) continue;
        // Canonical orientation: the side with the smaller min member first.
        if (clusters[x].member_ids.front() > clusters[y].member_ids.front()) continue;
        const double d = detail::cosine_distance_raw(centroids[x], centroids[y]);
        const bool better =
            !found || d < best ||
            (d == best &&
             (clusters[x].member_ids.front() < clusters[best_x].member_ids.front() ||
              (clusters[x].member_ids.front() == clusters[best_x].member_ids.front() &&
               clusters[y].member_ids.front() < clusters[best_y].member_ids.front())));
        if (better) {
          found = true;
          best = d;
          best_x = x;
          best_y = y;
        }
      }
    }
    if (!found || !(best < threshold)) break;

    OracleCluster merged;
    merged.dendro_id = next_id++;
    merged.member_ids = clusters[best_x].member_ids;
    merged.member_ids.insert(merged.member_ids.end(),
                             clusters[best_y].member_ids.begin(),
                             clusters[best_y].member_ids.end());
    std::sort(merged.member_ids.begin(), merged.member_ids.end());

    log.push_back({static_cast<int>(log.size()) + 1, clusters[best_x].dendro_id,
                   clusters[best_y].dendro_id, best, merged.dendro_id});

    // Erase the higher index first so the lower one stays valid.
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(std::max(best_x, best_y)));
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(std::min(best_x, best_y)));
    clusters.push_back(std::move(merged));
  }

  OracleClustering out;
  out.merge_log = std::move(log);
  for (OracleCluster& c : clusters) out.clusters.push_back(std::move(c.member_ids));
  std::sort(out.clusters.begin(), out.clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

std::vector<std::string> rank_order_oracle(const std::string& probe,
                                           std::vector<Neighbor> nn,
                                           const ConstraintMatrices& matrices,
                                           const FaceSetIndex& space) {
  std::vector<std::string> rn;
  auto in_rn = [&](const std::string& id) {
    return std::find(rn.begin(), rn.end(), id) != rn.end();
  };

  // Lines 1-6: MA pass over NN, removing matched neighbors.
  {
    std::vector<Neighbor> remaining;
    for (const Neighbor& n : nn) {
      if (matrices.ma(probe, n.set_id) != nullptr) {
        rn.push_back(n.set_id);
      } else {
        remaining.push_back(n);
      }
    }
    nn = std::move(remaining);
  }

  // Line 7: every x with MA(p, x) not yet ranked, closest first.
  {
    std::vector<Neighbor> extras;
    for (const auto& [key, label] : matrices.ma_entries()) {
      if (key.first != probe) continue;
      if (in_rn(key.second)) continue;
      extras.push_back({key.second,
                        cosine_distance(space.representative(probe),
                                        space.representative(key.second))});
    }
    std::sort(extras.begin(), extras.end(), [](const Neighbor& a, const Neighbor& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      return a.set_id < b.set_id;
    });
    for (const Neighbor& n : extras) rn.push_back(n.set_id);
  }

  // Line 8: repeat the NN pass for NA.
  {
    std::vector<Neighbor> remaining;
    for (const Neighbor& n : nn) {
      if (matrices.na(probe, n.set_id) != nullptr) {
        rn.push_back(n.set_id);
      } else {
        remaining.push_back(n);
      }
    }
    nn = std::move(remaining);
  }

  // Line 9: whatever is left of NN.
  for (const Neighbor& n : nn) rn.push_back(n.set_id);
  return rn;
}

}  // namespace clusterface::testing
