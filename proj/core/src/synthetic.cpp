#include "clusterface/synthetic.hpp"

#include <cmath>
#include <cstdio>

namespace clusterface {

namespace detail {

double DeterministicRng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double DeterministicRng::gaussian() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * 3.14159265358979323846 * u2;
  cached_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

}  // namespace detail

void SyntheticSpec::validate() const {
  if (identities < 1) throw ValidationError("synthetic spec: identities must be >= 1");
  if (sets_per_identity < 1) {
    throw ValidationError("synthetic spec: sets_per_identity must be >= 1");
  }
  if (dimension < 2) throw ValidationError("synthetic spec: dimension must be >= 2");
  if (!(within_noise >= 0.0) || !std::isfinite(within_noise)) {
    throw ValidationError("synthetic spec: within_noise must be >= 0");
  }
  if (!(condition_split >= 0.0 && condition_split <= 1.0)) {
    throw ValidationError("synthetic spec: condition_split must be in [0, 1]");
  }
  if (bridge_count < 0) throw ValidationError("synthetic spec: bridge_count must be >= 0");
}

namespace {

std::vector<double> random_unit(detail::DeterministicRng& rng, int dim) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  while (true) {
    for (double& x : v) x = rng.gaussian();
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq > 1e-12) {
      const double n = std::sqrt(sq);
      for (double& x : v) x /= n;
      return v;
    }
  }
}

// Random unit vector orthogonal to `axis` (Gram-Schmidt on a fresh draw).
std::vector<double> random_unit_orthogonal(detail::DeterministicRng& rng,
                                           std::span<const double> axis) {
  while (true) {
    std::vector<double> v = random_unit(rng, static_cast<int>(axis.size()));
    double proj = 0.0;
    for (std::size_t i = 0; i < axis.size(); ++i) proj += v[i] * axis[i];
    for (std::size_t i = 0; i < axis.size(); ++i) v[i] -= proj * axis[i];
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq > 1e-12) {
      const double n = std::sqrt(sq);
      for (double& x : v) x /= n;
      return v;
    }
  }
}

// Rotation of `base` by `angle` radians toward the orthogonal unit `toward`.
std::vector<double> rotate_toward(std::span<const double> base,
                                  std::span<const double> toward, double angle) {
  std::vector<double> out(base.size());
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (std::size_t i = 0; i < base.size(); ++i) out[i] = c * base[i] + s * toward[i];
  return out;
}

std::string format_index(const char* prefix, int value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%03d", prefix, value);
  return buf;
}

FaceSet make_set(detail::DeterministicRng& rng, const std::string& set_id,
                 const std::string& identity, std::span<const double> direction,
                 double within_noise) {
  std::vector<FaceSample> members;
  members.reserve(kSyntheticMembersPerSet);
  for (int m = 0; m < kSyntheticMembersPerSet; ++m) {
    const std::vector<double> tangent = random_unit_orthogonal(rng, direction);
    const double angle = within_noise * rng.gaussian();
    std::vector<double> values = rotate_toward(direction, tangent, angle);
    const double score = 0.5 + 0.5 * rng.uniform01();
    members.push_back({Embedding(std::move(values)), score});
  }
  return FaceSet(set_id, identity, std::move(members));
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  detail::DeterministicRng rng(spec.seed);

  const double offset = spec.condition_split > 0.0 ? kConditionOffsetRadians : 0.0;
  const int displaced =
      static_cast<int>(std::lround(spec.condition_split * spec.sets_per_identity));

  SyntheticData data;
  data.sets.reserve(static_cast<std::size_t>(spec.identities) *
                    static_cast<std::size_t>(spec.sets_per_identity + spec.bridge_count));

  for (int id = 0; id < spec.identities; ++id) {
    const std::string identity = format_index("id", id);
    const std::vector<double> base = random_unit(rng, spec.dimension);
    const std::vector<double> toward = random_unit_orthogonal(rng, base);

    for (int s = 0; s < spec.sets_per_identity; ++s) {
      const bool second_mode = s >= spec.sets_per_identity - displaced;
      const std::vector<double> direction =
          rotate_toward(base, toward, second_mode ? offset : 0.0);
      const std::string set_id = identity + format_index("_s", s);
      data.sets.push_back(make_set(rng, set_id, identity, direction, spec.within_noise));
      data.labels.emplace(set_id, identity);
    }
    for (int b = 1; b <= spec.bridge_count; ++b) {
      const double angle = offset * b / (spec.bridge_count + 1);
      const std::vector<double> direction = rotate_toward(base, toward, angle);
      const std::string set_id = identity + format_index("_b", b - 1);
      data.sets.push_back(make_set(rng, set_id, identity, direction, spec.within_noise));
      data.labels.emplace(set_id, identity);
    }
  }
  return data;
}

}  // namespace clusterface
