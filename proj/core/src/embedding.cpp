#include "clusterface/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clusterface {

namespace detail {

namespace {

void check_same_dimension(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ValidationError("dimension mismatch: " + std::to_string(a) + " vs " +
                          std::to_string(b));
  }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  check_same_dimension(a.size(), b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double cosine_similarity_raw(std::span<const double> a, std::span<const double> b) {
  check_same_dimension(a.size(), b.size());
  const double na = norm(a);
  const double nb = norm(b);
  if (na < kDegenerateNorm || nb < kDegenerateNorm) {
    throw ValidationError("cosine undefined for a (near-)zero-norm vector");
  }
  const double cos = dot(a, b) / (na * nb);
  return std::clamp(cos, -1.0, 1.0);
}

double cosine_distance_raw(std::span<const double> a, std::span<const double> b) {
  return 1.0 - cosine_similarity_raw(a, b);
}

void normalize_in_place(std::vector<double>& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double n = std::sqrt(sq);
  if (n < kDegenerateNorm) {
    throw ValidationError("cannot normalize a (near-)zero-norm vector");
  }
  // Unit within a few ulps already: leave the bits alone so that
  // normalize(normalize(v)) == normalize(v) exactly.
  if (std::abs(sq - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) return;
  for (double& x : v) x /= n;
}

}  // namespace detail

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw ValidationError("embedding must have dimension >= 1");
  }
  for (double x : values_) {
    if (!std::isfinite(x)) {
      throw ValidationError("embedding components must be finite");
    }
  }
  if (detail::norm(values_) < detail::kDegenerateNorm) {
    throw ValidationError("embedding must have strictly positive norm");
  }
}

Embedding Embedding::normalized() const {
  std::vector<double> v = values_;
  detail::normalize_in_place(v);
  return Embedding(std::move(v));
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  return detail::cosine_similarity_raw(a.values(), b.values());
}

double cosine_distance(const Embedding& a, const Embedding& b) {
  return 1.0 - cosine_similarity(a, b);
}

Embedding aggregate_set(std::span<const FaceSample> members) {
  if (members.empty()) {
    throw ValidationError("aggregate_set: empty member list");
  }
  const std::size_t dim = members.front().embedding.dimension();
  bool uniform = false;
  double score_sum = 0.0;
  for (const FaceSample& m : members) {
    if (m.embedding.dimension() != dim) {
      throw ValidationError("aggregate_set: dimension mismatch: " +
                            std::to_string(dim) + " vs " +
                            std::to_string(m.embedding.dimension()));
    }
    if (!m.score.has_value() || *m.score <= 0.0) {
      uniform = true;
    } else if (!(*m.score <= 1.0)) {
      throw ValidationError("detection score out of range (0, 1]");
    } else {
      score_sum += *m.score;
    }
  }

  std::vector<double> sum(dim, 0.0);
  const double n = static_cast<double>(members.size());
  for (const FaceSample& m : members) {
    const double w = uniform ? 1.0 / n : *m.score / score_sum;
    const auto values = m.embedding.values();
    for (std::size_t i = 0; i < dim; ++i) sum[i] += w * values[i];
  }
  if (detail::norm(sum) < detail::kDegenerateNorm) {
    throw ValidationError("aggregate_set: members cancel to a zero vector");
  }
  detail::normalize_in_place(sum);
  return Embedding(std::move(sum));
}

FaceSet::FaceSet(std::string set_id, std::optional<std::string> label,
                 std::vector<FaceSample> members)
    : set_id_(std::move(set_id)),
      label_(std::move(label)),
      members_([&members] {
        if (members.empty()) {
          throw ValidationError("face set must have at least one member");
        }
        for (FaceSample& m : members) m.embedding = m.embedding.normalized();
        return std::move(members);
      }()),
      representative_(aggregate_set(members_)) {
  if (set_id_.empty()) {
    throw ValidationError("face set id must be non-empty");
  }
  const std::size_t dim = members_.front().embedding.dimension();
  for (const FaceSample& m : members_) {
    if (m.embedding.dimension() != dim) {
      throw ValidationError("face set '" + set_id_ + "': member dimension mismatch: " +
                            std::to_string(dim) + " vs " +
                            std::to_string(m.embedding.dimension()));
    }
  }
}

std::vector<double> centroid(std::span<const Embedding> representatives) {
  if (representatives.empty()) {
    throw ValidationError("centroid: empty representative list");
  }
  const std::size_t dim = representatives.front().dimension();
  std::vector<double> mean(dim, 0.0);
  for (const Embedding& e : representatives) {
    if (e.dimension() != dim) {
      throw ValidationError("centroid: dimension mismatch: " + std::to_string(dim) +
                            " vs " + std::to_string(e.dimension()));
    }
    const auto values = e.values();
    for (std::size_t i = 0; i < dim; ++i) mean[i] += values[i];
  }
  const double n = static_cast<double>(representatives.size());
  for (double& x : mean) x /= n;
  return mean;
}

double centroid_distance(const SalientCluster& x, const SalientCluster& y) {
  if (x.member_set_ids.empty() || y.member_set_ids.empty()) {
    throw ValidationError("centroid_distance: empty cluster");
  }
  if (x.centroid.size() != y.centroid.size()) {
    throw ValidationError("centroid_distance: dimension mismatch: " +
                          std::to_string(x.centroid.size()) + " vs " +
                          std::to_string(y.centroid.size()));
  }
  if (detail::norm(x.centroid) < detail::kDegenerateNorm ||
      detail::norm(y.centroid) < detail::kDegenerateNorm) {
    throw ValidationError("degenerate cluster: centroid has (near-)zero norm");
  }
  return detail::cosine_distance_raw(x.centroid, y.centroid);
}

void PipelineConfig::validate() const {
  if (!(std::isfinite(beta) && beta >= 0.0 && beta <= 2.0)) {
    throw ValidationError("config: beta must be in [0, 2]");
  }
  if (!(std::isfinite(gamma) && gamma >= 0.0 && gamma < beta)) {
    throw ValidationError("config: gamma must satisfy 0 <= gamma < beta");
  }
  if (k < 1) {
    throw ValidationError("config: k must be >= 1");
  }
}

}  // namespace clusterface
