#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clusterface/error.hpp"

namespace clusterface {

namespace detail {

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);

/// 1 - cos(a, b) over raw coordinate vectors, clamped into [0, 2].
/// Throws ValidationError on dimension mismatch or a near-zero-norm input
/// (degenerate; cosine undefined).
double cosine_distance_raw(std::span<const double> a, std::span<const double> b);
double cosine_similarity_raw(std::span<const double> a, std::span<const double> b);

/// L2-normalizes v in place. Vectors already unit to machine precision are
/// left untouched, so normalization is idempotent at the bit level.
void normalize_in_place(std::vector<double>& v);

/// Norm below this is treated as a zero vector (degenerate direction).
inline constexpr double kDegenerateNorm = 1e-9;

}  // namespace detail

/// A point in the fixed-dimensional feature space. Components are finite and
/// the norm is strictly positive; both are enforced at construction.
class Embedding {
 public:
  explicit Embedding(std::vector<double> values);

  std::size_t dimension() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double norm() const { return detail::norm(values_); }

  /// Unit-length copy. Idempotent: normalizing an already-unit embedding
  /// returns it bit-for-bit.
  Embedding normalized() const;

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<double> values_;
};

/// Cosine similarity in [-1, 1]. Symmetric, scale invariant in each argument.
double cosine_similarity(const Embedding& a, const Embedding& b);

/// 1 - cosine_similarity, in [0, 2]. Zero iff the vectors are collinear and
/// point the same way.
double cosine_distance(const Embedding& a, const Embedding& b);

/// One face observation inside a set: its embedding plus an optional
/// detection confidence in (0, 1].
struct FaceSample {
  Embedding embedding;
  std::optional<double> score;

  friend bool operator==(const FaceSample&, const FaceSample&) = default;
};

/// Score-weighted aggregate of a face set, L2-normalized after summation.
/// Weights are the detection scores normalized to sum 1; if any score is
/// missing or non-positive the whole set falls back to uniform weights.
/// Scores above 1 are rejected.
Embedding aggregate_set(std::span<const FaceSample> members);

/// An identified collection of member embeddings (one image is a set of
/// cardinality 1). Members are L2-normalized at construction and the cached
/// representative is the aggregate_set of the normalized members.
class FaceSet {
 public:
  FaceSet(std::string set_id, std::optional<std::string> label,
          std::vector<FaceSample> members);

  const std::string& set_id() const noexcept { return set_id_; }
  const std::optional<std::string>& label() const noexcept { return label_; }
  std::span<const FaceSample> members() const noexcept { return members_; }
  const Embedding& representative() const noexcept { return representative_; }
  std::size_t dimension() const noexcept { return representative_.dimension(); }

  friend bool operator==(const FaceSet&, const FaceSet&) = default;

 private:
  std::string set_id_;
  std::optional<std::string> label_;
  std::vector<FaceSample> members_;
  Embedding representative_;
};

/// Unweighted arithmetic mean of representatives. Deliberately not
/// re-normalized; it may even be the zero vector for pathological opposing
/// members, which downstream centroid distances reject.
std::vector<double> centroid(std::span<const Embedding> representatives);

/// A cluster produced by salient clustering: member set ids (sorted) plus the
/// cached mean-of-representatives centroid.
struct SalientCluster {
  int cluster_index = 0;
  std::vector<std::string> member_set_ids;
  std::vector<double> centroid;

  std::size_t size() const noexcept { return member_set_ids.size(); }

  friend bool operator==(const SalientCluster&, const SalientCluster&) = default;
};

/// 1 - cos of the two cluster centroids. Throws ValidationError when either
/// centroid has (near-)zero norm, which signals pathological opposing members.
double centroid_distance(const SalientCluster& x, const SalientCluster& y);

enum class TieBreak { kLexicographic };

/// Every free parameter of the pipeline. beta is the verification threshold
/// and gamma the margin of uncertainty, both in cosine-distance space;
/// beta - gamma is the salient (high-confidence) threshold.
struct PipelineConfig {
  double beta = 0.4;
  double gamma = 0.1;
  int k = 5;
  std::int64_t seed = 0;
  TieBreak tie_break = TieBreak::kLexicographic;

  double salient_threshold() const noexcept { return beta - gamma; }

  /// Enforces beta in [0,2], 0 <= gamma < beta, k >= 1.
  void validate() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

}  // namespace clusterface
