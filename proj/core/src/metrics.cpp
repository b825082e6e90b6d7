#include "clusterface/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "clusterface/detail/parallel.hpp"

namespace clusterface {

std::string GammaPolicy::to_string() const {
  const char* name = mode == Mode::kProportional ? "proportional:" : "fixed:";
  // Plain shortest formatting is fine here; parse() accepts what we emit.
  std::string v = std::to_string(value);
  while (v.size() > 1 && v.back() == '0') v.pop_back();
  if (!v.empty() && v.back() == '.') v.pop_back();
  return name + v;
}

GammaPolicy GammaPolicy::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ValidationError("gamma policy must look like proportional:0.25 or fixed:0.1");
  }
  const std::string name = text.substr(0, colon);
  double value = 0.0;
  try {
    value = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw ValidationError("gamma policy has a malformed value: '" + text + "'");
  }
  if (!std::isfinite(value) || value < 0.0) {
    throw ValidationError("gamma policy value must be finite and >= 0");
  }
  if (name == "proportional") {
    if (value >= 1.0) {
      throw ValidationError("proportional gamma factor must be in [0, 1)");
    }
    return proportional(value);
  }
  if (name == "fixed") return fixed(value);
  throw ValidationError("unknown gamma policy '" + name + "'");
}

std::vector<double> make_beta_grid(double lo, double hi, int steps) {
  if (!(lo >= 0.0 && hi <= 2.0 && lo <= hi)) {
    throw ValidationError("beta grid must satisfy 0 <= lo <= hi <= 2");
  }
  if (steps < 1) throw ValidationError("beta grid needs at least one step");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) {
    grid.push_back(lo);
    return grid;
  }
  for (int i = 0; i < steps; ++i) {
    grid.push_back(lo + (hi - lo) * i / (steps - 1));
  }
  return grid;
}

namespace {

struct PairCounts {
  std::size_t genuine = 0;
  std::size_t impostor = 0;
};

PairCounts validate_pairs(std::span<const LabeledPair> pairs,
                          const FaceSetIndex& space) {
  PairCounts counts;
  for (const LabeledPair& p : pairs) {
    space.at(p.a);
    space.at(p.b);
    if (p.genuine) {
      ++counts.genuine;
    } else {
      ++counts.impostor;
    }
  }
  if (counts.impostor == 0) {
    throw ValidationError("tar_far_curve: no impostor pairs, FAR undefined");
  }
  if (counts.genuine == 0) {
    throw ValidationError("tar_far_curve: no genuine pairs, TAR undefined");
  }
  return counts;
}

}  // namespace

RocCurve tar_far_curve(std::span<const LabeledPair> pairs, VerifierKind verifier,
                       const FaceSetIndex& space, std::span<const double> beta_grid,
                       const GammaPolicy& gamma_policy, const PipelineConfig& base,
                       std::span<const double> far_targets) {
  if (beta_grid.empty()) {
    throw ValidationError("tar_far_curve: empty beta grid");
  }
  if (!std::is_sorted(beta_grid.begin(), beta_grid.end())) {
    throw ValidationError("tar_far_curve: beta grid must be ascending");
  }
  const PairCounts counts = validate_pairs(pairs, space);
  for (double beta : beta_grid) {
    PipelineConfig probe = base;
    probe.beta = beta;
    probe.gamma = gamma_policy.gamma_for(beta);
    probe.validate();  // rejects e.g. a fixed gamma above the smallest beta
  }

  // Pairwise representative distances do not change across the sweep.
  std::vector<double> direct_distance(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    direct_distance[i] = cosine_distance(space.representative(pairs[i].a),
                                         space.representative(pairs[i].b));
  }

  RocCurve curve;
  curve.points.resize(beta_grid.size());
  detail::parallel_for(
      beta_grid.size(), 0, [&](std::size_t begin, std::size_t end) {
        for (std::size_t g = begin; g < end; ++g) {
          PipelineConfig config = base;
          config.beta = beta_grid[g];
          config.gamma = gamma_policy.gamma_for(config.beta);

          std::size_t true_accepts = 0;
          std::size_t false_accepts = 0;
          if (verifier == VerifierKind::kDirect) {
            for (std::size_t i = 0; i < pairs.size(); ++i) {
              const bool accept = direct_distance[i] < config.beta;
              if (accept && pairs[i].genuine) ++true_accepts;
              if (accept && !pairs[i].genuine) ++false_accepts;
            }
          } else {
            const ClusteringResult result =
                run_salient_clustering(space, config, 1);
            const ConstraintMatrices matrices =
                build_constraints(result, space, {}, config.k, config.beta);
            for (const LabeledPair& p : pairs) {
              const VerificationDecision decision =
                  verify_clusterface(p.a, p.b, matrices, result, space, config);
              if (decision.same_identity && p.genuine) ++true_accepts;
              if (decision.same_identity && !p.genuine) ++false_accepts;
            }
          }
          curve.points[g] = {config.beta, config.gamma,
                             static_cast<double>(false_accepts) /
                                 static_cast<double>(counts.impostor),
                             static_cast<double>(true_accepts) /
                                 static_cast<double>(counts.genuine)};
        }
      });

  for (double target : far_targets) {
    // Step interpolation: the largest operating point with FAR <= target;
    // among equal FARs the best TAR. Nothing qualifying reports 0.
    double best_far = -1.0;
    double best_tar = 0.0;
    bool found = false;
    for (const RocPoint& p : curve.points) {
      if (p.far > target) continue;
      if (!found || p.far > best_far || (p.far == best_far && p.tar > best_tar)) {
        best_far = p.far;
        best_tar = p.tar;
        found = true;
      }
    }
    curve.tar_at_far.emplace_back(target, found ? best_tar : 0.0);
  }
  return curve;
}

namespace {

// 1-based rank of the probe's first same-identity element among the gallery
// candidates in `ranked`; 0 when the mate never appears.
int mate_rank(const std::vector<std::string>& ranked,
              const std::set<std::string>& gallery, const std::string& identity,
              const FaceSetIndex& space) {
  int position = 0;
  for (const std::string& id : ranked) {
    if (gallery.count(id) == 0) continue;  // ranks count gallery candidates only
    ++position;
    if (space.at(id).label() == identity) return position;
  }
  return 0;
}

}  // namespace

std::vector<std::pair<int, double>> cmc_curve(
    std::span<const std::string> probe_ids,
    std::span<const std::string> gallery_ids, IdentifierKind identifier,
    const FaceSetIndex& space, const PipelineConfig& config, int max_rank,
    MissingMatePolicy policy) {
  config.validate();
  if (max_rank < 1) throw ValidationError("cmc_curve: max_rank must be >= 1");
  if (probe_ids.empty()) throw ValidationError("cmc_curve: no probes");
  if (gallery_ids.empty()) throw ValidationError("cmc_curve: empty gallery");

  const std::set<std::string> gallery(gallery_ids.begin(), gallery_ids.end());
  std::set<std::string> gallery_identities;
  for (const std::string& id : gallery_ids) {
    const auto& label = space.at(id).label();
    if (!label.has_value()) {
      throw ValidationError("gallery set '" + id + "' has no identity label");
    }
    gallery_identities.insert(*label);
  }
  for (const std::string& id : probe_ids) {
    if (gallery.count(id) != 0) {
      throw ValidationError("probe '" + id + "' is also a gallery element");
    }
    if (!space.at(id).label().has_value()) {
      throw ValidationError("probe '" + id + "' has no ground-truth label");
    }
  }

  ClusteringResult result{{}, {}, config, 0};
  ConstraintMatrices matrices;
  if (identifier == IdentifierKind::kClusterFace) {
    result = run_salient_clustering(space, config, 0);
    matrices = build_constraints(result, space, space.labels(), config.k, config.beta);
  }

  std::vector<int> ranks(probe_ids.size(), -1);  // -1 excluded, 0 miss
  detail::parallel_for(
      probe_ids.size(), 0, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
          const std::string& probe = probe_ids[p];
          const std::string identity = *space.at(probe).label();
          if (gallery_identities.count(identity) == 0) {
            ranks[p] = policy == MissingMatePolicy::kExclude ? -1 : 0;
            continue;
          }
          std::vector<std::string> ranked;
          if (identifier == IdentifierKind::kClusterFace) {
            const std::vector<Neighbor> nn =
                knn_among(probe, space, gallery_ids, config.k, config.beta);
            ranked = rank_order_search(probe, nn, matrices, space).ranked;
          } else {
            std::vector<Neighbor> all;
            all.reserve(gallery_ids.size());
            for (const std::string& id : gallery_ids) {
              all.push_back({id, cosine_distance(space.representative(probe),
                                                 space.representative(id))});
            }
            std::sort(all.begin(), all.end(),
                      [](const Neighbor& x, const Neighbor& y) {
                        if (x.distance != y.distance) return x.distance < y.distance;
                        return x.set_id < y.set_id;
                      });
            for (const Neighbor& n : all) ranked.push_back(n.set_id);
          }
          ranks[p] = mate_rank(ranked, gallery, identity, space);
        }
      });

  std::size_t counted = 0;
  for (int r : ranks) {
    if (r >= 0) ++counted;
  }
  if (counted == 0) {
    throw ValidationError("cmc_curve: no evaluable probes (all mates absent)");
  }

  std::vector<std::pair<int, double>> cmc;
  cmc.reserve(static_cast<std::size_t>(max_rank));
  for (int r = 1; r <= max_rank; ++r) {
    std::size_t hits = 0;
    for (int rank : ranks) {
      if (rank >= 1 && rank <= r) ++hits;
    }
    cmc.emplace_back(r, static_cast<double>(hits) / static_cast<double>(counted));
  }
  return cmc;
}

ScalingReport scaling_bench(std::span<const std::size_t> sizes,
                            const SyntheticSpec& template_spec,
                            const PipelineConfig& config) {
  if (sizes.size() < 3) {
    throw ValidationError("scaling_bench: need at least 3 sizes");
  }
  if (!std::is_sorted(sizes.begin(), sizes.end())) {
    throw ValidationError("scaling_bench: sizes must be ascending");
  }
  config.validate();

  const int per_identity = template_spec.sets_per_identity + template_spec.bridge_count;

  auto build_index = [&](std::size_t size) {
    SyntheticSpec spec = template_spec;
    spec.identities = static_cast<int>(
        (size + static_cast<std::size_t>(per_identity) - 1) /
        static_cast<std::size_t>(per_identity));
    SyntheticData data = generate_synthetic(spec);
    data.sets.erase(data.sets.begin() + static_cast<std::ptrdiff_t>(size),
                    data.sets.end());
    return FaceSetIndex(std::move(data.sets));
  };

  // Warm up allocator and caches on the smallest size before timing.
  {
    const FaceSetIndex warmup = build_index(sizes.front());
    (void)run_salient_clustering(warmup, config);
  }

  ScalingReport report;
  std::vector<std::pair<double, double>> points;
  for (std::size_t size : sizes) {
    const FaceSetIndex index = build_index(size);
    const auto start = std::chrono::steady_clock::now();
    const ClusteringResult result = run_salient_clustering(index, config);
    const auto stop = std::chrono::steady_clock::now();
    const double seconds =
        std::chrono::duration_cast<std::chrono::duration<double>>(stop - start).count();
    report.rows.push_back({size, result.distance_evaluations(), seconds});
    points.emplace_back(static_cast<double>(size), std::max(seconds, 1e-9));
  }
  report.loglog_slope = fit_loglog_slope(points);
  return report;
}

double fit_loglog_slope(std::span<const std::pair<double, double>> xy) {
  if (xy.size() < 2) {
    throw ValidationError("fit_loglog_slope: need at least 2 points");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(xy.size());
  for (const auto& [x, y] : xy) {
    const double lx = std::log(x);
    const double ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) {
    throw ValidationError("fit_loglog_slope: degenerate x values");
  }
  return (n * sxy - sx * sy) / denom;
}

}  // namespace clusterface
