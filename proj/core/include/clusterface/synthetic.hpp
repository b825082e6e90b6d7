#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "clusterface/embedding.hpp"

namespace clusterface {

/// Desk-scale synthetic geometry: per identity a base direction drawn
/// uniformly on the unit sphere, a second appearance mode at a fixed angular
/// offset when condition_split > 0, members jittered by within_noise (angular
/// std-dev, radians), plus bridge_count interpolated sets chaining the two
/// modes. Generation is a deterministic function of all fields.
struct SyntheticSpec {
  int identities = 1;
  int sets_per_identity = 1;
  int dimension = 2;
  double within_noise = 0.0;
  double condition_split = 0.0;
  int bridge_count = 0;
  std::uint64_t seed = 0;

  void validate() const;

  friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

struct SyntheticData {
  std::vector<FaceSet> sets;
  std::map<std::string, std::string> labels;  // set_id -> identity (ground truth)
};

/// Angular displacement of the second condition mode, radians (75 degrees).
/// Wide enough that cross-mode pairs of one identity look like impostors to a
/// plain threshold, while the bridge chain keeps consecutive gaps small.
inline constexpr double kConditionOffsetRadians = 1.3089969389957471827;

/// Members generated per synthetic set.
inline constexpr int kSyntheticMembersPerSet = 3;

SyntheticData generate_synthetic(const SyntheticSpec& spec);

namespace detail {

/// Deterministic portable RNG. mt19937_64 output is fully specified by the
/// standard; uniform and gaussian draws are derived by hand (53-bit scaling,
/// Box-Muller) instead of std distributions, whose sequences are
/// implementation-defined.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01();
  double gaussian();

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace detail

}  // namespace clusterface
