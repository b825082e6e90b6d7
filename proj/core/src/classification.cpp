#include "clusterface/classification.hpp"

#include <algorithm>
#include <set>

namespace clusterface {

std::string to_string(VerificationRule rule) {
  switch (rule) {
    case VerificationRule::kMustAssociate: return "MA";
    case VerificationRule::kNeighborhoodCentroid: return "NA_CENTROID";
    case VerificationRule::kNone: return "NONE";
    case VerificationRule::kDirect: return "DIRECT";
  }
  return "NONE";
}

VerificationDecision verify_direct(const std::string& i, const std::string& j,
                                   const FaceSetIndex& space, double beta) {
  const double d = cosine_distance(space.representative(i), space.representative(j));
  return {{i, j}, d < beta, VerificationRule::kDirect};
}

VerificationDecision verify_clusterface(const std::string& i, const std::string& j,
                                        const ConstraintMatrices& matrices,
                                        const ClusteringResult& result,
                                        const FaceSetIndex& space,
                                        const PipelineConfig& config) {
  if (matrices.ma(i, j) != nullptr) {
    return {{i, j}, true, VerificationRule::kMustAssociate};
  }
  if (const ClusterLabel* label = matrices.na(i, j)) {
    const SalientCluster& cluster =
        result.clusters().at(static_cast<std::size_t>(label->cluster_index));
    const double d = detail::cosine_distance_raw(
        cluster.centroid, space.representative(j).values());
    if (d < config.salient_threshold()) {
      return {{i, j}, true, VerificationRule::kNeighborhoodCentroid};
    }
  }
  return {{i, j}, false, VerificationRule::kNone};
}

RankedList rank_order_search(const std::string& probe, std::span<const Neighbor> nn,
                             const ConstraintMatrices& matrices,
                             const FaceSetIndex& space) {
  for (const Neighbor& n : nn) {
    if (n.set_id == probe) {
      throw ValidationError("rank_order_search: probe '" + probe +
                            "' appears in its own neighbor list");
    }
  }

  RankedList out{probe, {}};
  std::set<std::string> emitted;
  auto emit = [&](const std::string& id) {
    if (emitted.insert(id).second) out.ranked.push_back(id);
  };

  // Neighbors with a must-associate to the probe, in nn order.
  for (const Neighbor& n : nn) {
    if (matrices.ma(probe, n.set_id) != nullptr) emit(n.set_id);
  }

  // Remaining MA co-members of the probe, closest first.
  std::vector<Neighbor> co_members;
  const auto& ma = matrices.ma_entries();
  for (auto it = ma.lower_bound(ConstraintKey{probe, ""});
       it != ma.end() && it->first.first == probe; ++it) {
    const std::string& x = it->first.second;
    if (emitted.count(x) != 0) continue;
    co_members.push_back(
        {x, cosine_distance(space.representative(probe), space.representative(x))});
  }
  std::sort(co_members.begin(), co_members.end(),
            [](const Neighbor& a, const Neighbor& b) {
              if (a.distance != b.distance) return a.distance < b.distance;
              return a.set_id < b.set_id;
            });
  for (const Neighbor& n : co_members) emit(n.set_id);

  // Remaining neighbors with a neighborhood-associate, in nn order.
  for (const Neighbor& n : nn) {
    if (emitted.count(n.set_id) == 0 && matrices.na(probe, n.set_id) != nullptr) {
      emit(n.set_id);
    }
  }

  // Everything left in the neighbor list, original order.
  for (const Neighbor& n : nn) emit(n.set_id);

  return out;
}

namespace {

void require_labeled_gallery(std::span<const std::string> gallery_ids,
                             const FaceSetIndex& space) {
  if (gallery_ids.empty()) {
    throw ValidationError("identification requires a non-empty gallery");
  }
  for (const std::string& id : gallery_ids) {
    if (!space.at(id).label().has_value()) {
      throw ValidationError("gallery set '" + id + "' has no identity label");
    }
  }
}

}  // namespace

std::optional<std::string> identify_rank1(const std::string& probe,
                                          std::span<const std::string> gallery_ids,
                                          const ConstraintMatrices& matrices,
                                          const FaceSetIndex& space,
                                          const PipelineConfig& config) {
  require_labeled_gallery(gallery_ids, space);
  const std::vector<Neighbor> nn =
      knn_among(probe, space, gallery_ids, config.k, config.beta);
  const RankedList ranked = rank_order_search(probe, nn, matrices, space);
  const std::set<std::string> gallery(gallery_ids.begin(), gallery_ids.end());
  for (const std::string& id : ranked.ranked) {
    if (gallery.count(id) != 0) return space.at(id).label();
  }
  return std::nullopt;
}

std::optional<std::string> identify_direct(const std::string& probe,
                                           std::span<const std::string> gallery_ids,
                                           const FaceSetIndex& space) {
  require_labeled_gallery(gallery_ids, space);
  const Embedding& q = space.representative(probe);
  const std::string* best = nullptr;
  double best_distance = 0.0;
  for (const std::string& id : gallery_ids) {
    const double d = cosine_distance(q, space.representative(id));
    if (best == nullptr || d < best_distance ||
        (d == best_distance && id < *best)) {
      best = &id;
      best_distance = d;
    }
  }
  return space.at(*best).label();
}

}  // namespace clusterface
