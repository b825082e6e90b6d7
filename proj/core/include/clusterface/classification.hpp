#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clusterface/constraints.hpp"

namespace clusterface {

enum class VerificationRule { kMustAssociate, kNeighborhoodCentroid, kNone, kDirect };

std::string to_string(VerificationRule rule);

struct VerificationDecision {
  std::pair<std::string, std::string> pair;
  bool same_identity = false;
  VerificationRule rule_fired = VerificationRule::kNone;

  friend bool operator==(const VerificationDecision&, const VerificationDecision&) = default;
};

/// Baseline: same identity iff the representative cosine distance is strictly
/// below beta.
VerificationDecision verify_direct(const std::string& i, const std::string& j,
                                   const FaceSetIndex& space, double beta);

/// Constrained verification: true via MA when the pair shares a salient
/// cluster; otherwise true via the neighborhood rule when NA(i, j) holds and
/// j's representative lies within beta - gamma of the centroid of the cluster
/// through which NA holds; otherwise false.
VerificationDecision verify_clusterface(const std::string& i, const std::string& j,
                                        const ConstraintMatrices& matrices,
                                        const ClusteringResult& result,
                                        const FaceSetIndex& space,
                                        const PipelineConfig& config);

struct RankedList {
  std::string probe;
  std::vector<std::string> ranked;

  friend bool operator==(const RankedList&, const RankedList&) = default;
};

/// Constrained rank-order search. Emits, in order: nn members with MA to the
/// probe (nn order kept), the probe's remaining MA co-members by distance
/// ascending, remaining nn members with NA(probe, .) (nn order kept), then all
/// remaining nn members. The output is a permutation of nn plus the probe's
/// MA co-members, without duplicates.
RankedList rank_order_search(const std::string& probe, std::span<const Neighbor> nn,
                             const ConstraintMatrices& matrices,
                             const FaceSetIndex& space);

/// Rank-1 identification: rank-order search over the probe's qualifying
/// gallery neighbors; the label of the first ranked element that belongs to
/// the gallery, or nothing when no gallery element is ranked.
std::optional<std::string> identify_rank1(const std::string& probe,
                                          std::span<const std::string> gallery_ids,
                                          const ConstraintMatrices& matrices,
                                          const FaceSetIndex& space,
                                          const PipelineConfig& config);

/// Baseline identification: label of the gallery element closest to the probe
/// (ties on distance broken by set id).
std::optional<std::string> identify_direct(const std::string& probe,
                                           std::span<const std::string> gallery_ids,
                                           const FaceSetIndex& space);

}  // namespace clusterface
