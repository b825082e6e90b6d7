#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clusterface/classification.hpp"
#include "clusterface/synthetic.hpp"

namespace clusterface {

enum class VerifierKind { kDirect, kClusterFace };
enum class IdentifierKind { kDirect, kClusterFace };

/// Margin policy for threshold sweeps: gamma = value * beta (proportional) or
/// a fixed constant.
struct GammaPolicy {
  enum class Mode { kProportional, kFixed };

  Mode mode = Mode::kProportional;
  double value = 0.25;

  static GammaPolicy proportional(double factor) {
    return {Mode::kProportional, factor};
  }
  static GammaPolicy fixed(double gamma) { return {Mode::kFixed, gamma}; }

  double gamma_for(double beta) const {
    return mode == Mode::kProportional ? value * beta : value;
  }
  std::string to_string() const;
  static GammaPolicy parse(const std::string& text);

  friend bool operator==(const GammaPolicy&, const GammaPolicy&) = default;
};

struct LabeledPair {
  std::string a;
  std::string b;
  bool genuine = false;
};

struct RocPoint {
  double beta = 0.0;
  double gamma = 0.0;
  double far = 0.0;
  double tar = 0.0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;                       // ascending beta
  std::vector<std::pair<double, double>> tar_at_far;  // (target, TAR)
};

inline constexpr std::array<double, 3> kDefaultFarTargets{0.001, 0.01, 0.1};

/// Evenly spaced beta grid, endpoints included.
std::vector<double> make_beta_grid(double lo, double hi, int steps);

/// Sweeps beta over the grid (gamma per policy), recomputing clustering and
/// constraints per grid point for the ClusterFace verifier, and reports TAR at
/// the largest operating point with FAR <= each target (step interpolation;
/// 0 when no grid point qualifies).
RocCurve tar_far_curve(std::span<const LabeledPair> pairs, VerifierKind verifier,
                       const FaceSetIndex& space, std::span<const double> beta_grid,
                       const GammaPolicy& gamma_policy, const PipelineConfig& base,
                       std::span<const double> far_targets = kDefaultFarTargets);

/// What to do with probes whose identity is absent from the gallery.
enum class MissingMatePolicy { kExclude, kCountAsMiss };

/// Fraction of probes whose gallery mate appears within the top r gallery
/// candidates of the rank-order output, for r = 1..max_rank.
std::vector<std::pair<int, double>> cmc_curve(
    std::span<const std::string> probe_ids,
    std::span<const std::string> gallery_ids, IdentifierKind identifier,
    const FaceSetIndex& space, const PipelineConfig& config, int max_rank,
    MissingMatePolicy policy = MissingMatePolicy::kExclude);

/// One evaluation report, serialized as a single JSON document by cli-io.
struct MetricsReport {
  std::string task;  // "verification" | "identification"
  PipelineConfig config;
  std::string gamma_policy;
  std::size_t pair_count = 0;
  std::size_t genuine_count = 0;
  std::size_t impostor_count = 0;
  std::size_t probe_count = 0;
  std::size_t gallery_size = 0;
  std::vector<std::pair<double, double>> tar_at_far;
  std::vector<RocPoint> roc;
  std::vector<std::pair<int, double>> cmc;
};

struct ScalingRow {
  std::size_t sets = 0;
  std::size_t distance_evaluations = 0;
  double wall_seconds = 0.0;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  double loglog_slope = 0.0;
};

/// Runs clustering at each size (sets drawn from the synthetic template) and
/// fits the log-log slope of wall time versus size. Requires >= 3 ascending
/// sizes.
ScalingReport scaling_bench(std::span<const std::size_t> sizes,
                            const SyntheticSpec& template_spec,
                            const PipelineConfig& config);

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(std::span<const std::pair<double, double>> xy);

}  // namespace clusterface
