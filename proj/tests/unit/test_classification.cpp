#include <cmath>

#include <doctest.h>

#include "clusterface/classification.hpp"
#include "clusterface/synthetic.hpp"
#include "support/oracles.hpp"
#include "support/test_rng.hpp"

using namespace clusterface;
using clusterface::testing::TestRng;

namespace {

constexpr double kPi = 3.14159265358979323846;

FaceSet planar_set(const std::string& id, double degrees,
                   std::optional<std::string> label = std::nullopt) {
  return FaceSet(id, std::move(label),
                 {{TestRng::planar(degrees * kPi / 180.0), std::nullopt}});
}

/// Same worked geometry as the constraint tests, with labels: cluster A holds
/// alice's sets at 0 and 5 degrees, cluster B holds bob's at 90 and 95, and
/// the 20-degree query is its own singleton cluster.
struct VerifyFixture {
  FaceSetIndex space;
  ClusteringResult result;
  ConstraintMatrices matrices;

  explicit VerifyFixture(double beta = 0.2, double gamma = 0.0)
      : space([] {
          std::vector<FaceSet> sets;
          sets.push_back(planar_set("a000", 0.0, "alice"));
          sets.push_back(planar_set("a005", 5.0, "alice"));
          sets.push_back(planar_set("b090", 90.0, "bob"));
          sets.push_back(planar_set("b095", 95.0, "bob"));
          sets.push_back(planar_set("q020", 20.0));
          return FaceSetIndex(std::move(sets));
        }()),
        result([this, beta, gamma] {
          const std::vector<Embedding> a = {space.representative("a000"),
                                            space.representative("a005")};
          const std::vector<Embedding> b = {space.representative("b090"),
                                            space.representative("b095")};
          const std::vector<Embedding> q = {space.representative("q020")};
          std::vector<SalientCluster> clusters;
          clusters.push_back({0, {"a000", "a005"}, centroid(a)});
          clusters.push_back({1, {"b090", "b095"}, centroid(b)});
          clusters.push_back({2, {"q020"}, centroid(q)});
          PipelineConfig config;
          config.beta = beta;
          config.gamma = gamma;
          return ClusteringResult(std::move(clusters), {}, config, 0);
        }()),
        matrices(build_constraints(result, space, space.labels(), 2, beta)) {}

  PipelineConfig config() const { return result.config(); }
};

}  // namespace

TEST_CASE("verify_direct") {
  VerifyFixture fx;
  SUBCASE("identical representatives accept at any positive beta") {
    const auto d = verify_direct("a000", "a000", fx.space, 0.4);
    CHECK(d.same_identity);
    CHECK(d.rule_fired == VerificationRule::kDirect);
  }
  SUBCASE("orthogonal representatives are rejected at beta 0.4") {
    CHECK_FALSE(verify_direct("a000", "b090", fx.space, 0.4).same_identity);
  }
  SUBCASE("a distance exactly at beta is rejected (strict inequality)") {
    // d(a000, b090) == 1 exactly up to the clamp; use beta == that distance.
    const double d =
        cosine_distance(fx.space.representative("a000"), fx.space.representative("b090"));
    CHECK_FALSE(verify_direct("a000", "b090", fx.space, d).same_identity);
  }
  SUBCASE("unknown ids") {
    CHECK_THROWS_AS(verify_direct("a000", "nope", fx.space, 0.4), ValidationError);
  }
}

TEST_CASE("verify_clusterface exercises every branch of the decision rule") {
  SUBCASE("co-members of a salient cluster: true via MA") {
    VerifyFixture fx;
    const auto d = verify_clusterface("a000", "a005", fx.matrices, fx.result,
                                      fx.space, fx.config());
    CHECK(d.same_identity);
    CHECK(d.rule_fired == VerificationRule::kMustAssociate);
  }

  SUBCASE("NA plus a close cluster centroid: true via the neighborhood rule") {
    VerifyFixture fx(0.2, 0.0);  // salient threshold 0.2
    const auto d = verify_clusterface("a000", "q020", fx.matrices, fx.result,
                                      fx.space, fx.config());
    CHECK(d.same_identity);
    CHECK(d.rule_fired == VerificationRule::kNeighborhoodCentroid);
    // Hand evaluation: centroid of A points at 2.5 degrees, the query at 20,
    // so the gate compares 1 - cos(17.5 deg) ~ 0.04628 against 0.2.
    const SalientCluster& a = fx.result.clusters()[0];
    const double gate = detail::cosine_distance_raw(
        a.centroid, fx.space.representative("q020").values());
    CHECK(gate == doctest::Approx(1.0 - std::cos(17.5 * kPi / 180.0)).epsilon(1e-12));
    CHECK(gate < 0.2);
  }

  SUBCASE("NA present but the centroid gate fails: false via NONE") {
    VerifyFixture fx(0.2, 0.17);  // salient threshold 0.03 < 0.04628
    REQUIRE(fx.matrices.na("a000", "q020") != nullptr);
    const auto d = verify_clusterface("a000", "q020", fx.matrices, fx.result,
                                      fx.space, fx.config());
    CHECK_FALSE(d.same_identity);
    CHECK(d.rule_fired == VerificationRule::kNone);
  }

  SUBCASE("no constraint at all: false via NONE") {
    VerifyFixture fx;
    REQUIRE(fx.matrices.ma("b090", "q020") == nullptr);
    REQUIRE(fx.matrices.na("b090", "q020") == nullptr);
    const auto d = verify_clusterface("b090", "q020", fx.matrices, fx.result,
                                      fx.space, fx.config());
    CHECK_FALSE(d.same_identity);
    CHECK(d.rule_fired == VerificationRule::kNone);
  }
}

namespace {

ConstraintMatrices hand_matrices(std::vector<std::pair<std::string, std::string>> ma_pairs,
                                 std::vector<std::pair<std::string, std::string>> na_pairs,
                                 int k = 3) {
  ConstraintMap ma;
  ConstraintMap na;
  for (auto& p : ma_pairs) {
    ma.emplace(ConstraintKey{p.first, p.second}, ClusterLabel{0, "x"});
    ma.emplace(ConstraintKey{p.second, p.first}, ClusterLabel{0, "x"});
  }
  for (auto& p : na_pairs) {
    na.emplace(ConstraintKey{p.first, p.second}, ClusterLabel{0, "x"});
  }
  return ConstraintMatrices(std::move(ma), std::move(na), k);
}

}  // namespace

TEST_CASE("rank_order_search") {
  std::vector<FaceSet> sets;
  sets.push_back(planar_set("p", 0.0));
  sets.push_back(planar_set("n1", 10.0));
  sets.push_back(planar_set("n2", 20.0));
  sets.push_back(planar_set("n3", 30.0));
  sets.push_back(planar_set("a", 40.0));
  sets.push_back(planar_set("b", 50.0));
  const FaceSetIndex space(std::move(sets));

  const std::vector<Neighbor> nn = {
      {"n1", cosine_distance(space.representative("p"), space.representative("n1"))},
      {"n2", cosine_distance(space.representative("p"), space.representative("n2"))},
      {"n3", cosine_distance(space.representative("p"), space.representative("n3"))}};

  SUBCASE("MA neighbors first in nn order, the rest keep their order") {
    const auto matrices = hand_matrices({{"p", "n1"}, {"p", "n3"}}, {});
    const RankedList out = rank_order_search("p", nn, matrices, space);
    CHECK(out.ranked == std::vector<std::string>{"n1", "n3", "n2"});
  }

  SUBCASE("empty constraints reproduce nn unchanged") {
    const ConstraintMatrices empty;
    const RankedList out = rank_order_search("p", nn, empty, space);
    CHECK(out.ranked == std::vector<std::string>{"n1", "n2", "n3"});
  }

  SUBCASE("with no neighbors, MA co-members arrive closest first") {
    // d(p, a) < d(p, b) by construction (40 vs 50 degrees).
    const auto matrices = hand_matrices({{"p", "b"}, {"p", "a"}}, {});
    const RankedList out = rank_order_search("p", {}, matrices, space);
    CHECK(out.ranked == std::vector<std::string>{"a", "b"});
  }

  SUBCASE("NA neighbors precede unconstrained ones") {
    const auto matrices = hand_matrices({}, {{"p", "n3"}});
    const RankedList out = rank_order_search("p", nn, matrices, space);
    CHECK(out.ranked == std::vector<std::string>{"n3", "n1", "n2"});
  }

  SUBCASE("the probe may not appear in its own neighbor list") {
    const std::vector<Neighbor> bad = {{"p", 0.0}};
    CHECK_THROWS_AS(rank_order_search("p", bad, ConstraintMatrices{}, space),
                    ValidationError);
  }

  SUBCASE("agrees with the line-by-line transcription oracle") {
    const auto matrices = hand_matrices({{"p", "n3"}, {"p", "b"}}, {{"p", "n2"}});
    const RankedList got = rank_order_search("p", nn, matrices, space);
    const auto want = testing::rank_order_oracle("p", nn, matrices, space);
    CHECK(got.ranked == want);
  }
}

TEST_CASE("identify_rank1") {
  VerifyFixture fx;
  const std::vector<std::string> gallery = {"a000", "a005", "b090", "b095"};

  SUBCASE("a probe coincident with one gallery member returns that label") {
    std::vector<FaceSet> sets;
    sets.push_back(planar_set("probe", 15.0));
    sets.push_back(planar_set("gx", 15.0, "X"));
    sets.push_back(planar_set("gy", 120.0, "Y"));
    const FaceSetIndex space(std::move(sets));
    PipelineConfig config;
    config.beta = 0.4;
    config.gamma = 0.1;
    config.k = 2;
    const std::vector<std::string> small_gallery = {"gx", "gy"};
    const auto label = identify_rank1("probe", small_gallery, ConstraintMatrices{},
                                      space, config);
    REQUIRE(label.has_value());
    CHECK(*label == "X");
  }

  SUBCASE("the nearest qualifying gallery member wins without constraints") {
    PipelineConfig config = fx.config();
    config.k = 4;
    const auto label = identify_rank1("q020", gallery, fx.matrices, fx.space, config);
    REQUIRE(label.has_value());
    CHECK(*label == "alice");
  }

  SUBCASE("no qualifying neighbors and no constraints yield nothing") {
    PipelineConfig config = fx.config();
    config.beta = 0.0;  // nothing qualifies
    const ConstraintMatrices empty;
    CHECK_FALSE(identify_rank1("q020", gallery, empty, fx.space, config).has_value());
  }

  SUBCASE("empty gallery is an error") {
    CHECK_THROWS_AS(identify_rank1("q020", {}, fx.matrices, fx.space, fx.config()),
                    ValidationError);
  }

  SUBCASE("unlabeled gallery is an error") {
    const std::vector<std::string> bad = {"q020", "a000"};
    CHECK_THROWS_AS(identify_rank1("b090", bad, fx.matrices, fx.space, fx.config()),
                    ValidationError);
  }
}

TEST_CASE("identify_direct") {
  VerifyFixture fx;
  SUBCASE("single-member gallery") {
    const std::vector<std::string> gallery = {"b090"};
    CHECK(identify_direct("q020", gallery, fx.space) == std::optional<std::string>("bob"));
  }
  SUBCASE("equidistant gallery members tie toward the smaller set id") {
    std::vector<FaceSet> sets;
    sets.push_back(planar_set("p", 0.0));
    sets.push_back(planar_set("g2", 45.0, "right"));
    sets.push_back(planar_set("g1", -45.0, "left"));
    const FaceSetIndex space(std::move(sets));
    const std::vector<std::string> gallery = {"g1", "g2"};
    CHECK(identify_direct("p", gallery, space) == std::optional<std::string>("left"));
  }
  SUBCASE("nearest gallery member wins") {
    const std::vector<std::string> gallery = {"a000", "a005", "b090", "b095"};
    CHECK(identify_direct("q020", gallery, fx.space) ==
          std::optional<std::string>("alice"));
  }
}

TEST_CASE("rank-1 identification matches the nearest-gallery oracle on synthetic data") {
  // Three well-separated identities; with no firing constraints the ranked
  // search must reduce to plain nearest-gallery association.
  SyntheticSpec spec;
  spec.identities = 3;
  spec.sets_per_identity = 3;
  spec.dimension = 16;
  spec.within_noise = 0.05;
  spec.seed = 99;
  SyntheticData data = generate_synthetic(spec);
  const FaceSetIndex space(std::move(data.sets));
  const auto ids = space.ids();

  const std::string probe = ids.front();  // first set of identity 0
  const std::vector<std::string> gallery(ids.begin() + 1, ids.end());

  PipelineConfig config;
  config.beta = 2.0;
  config.gamma = 0.1;
  config.k = static_cast<int>(gallery.size());
  const ClusteringResult singletons = run_salient_clustering(
      space, [] {
        PipelineConfig c;
        c.beta = 2.0;
        c.gamma = 2.0 - 1e-10;
        return c;
      }());
  const ConstraintMatrices matrices =
      build_constraints(singletons, space, space.labels(), config.k, config.beta);

  const auto got = identify_rank1(probe, gallery, matrices, space, config);

  const std::string* best = nullptr;
  double best_distance = 0.0;
  for (const std::string& id : gallery) {
    const double d =
        cosine_distance(space.representative(probe), space.representative(id));
    if (best == nullptr || d < best_distance) {
      best = &id;
      best_distance = d;
    }
  }
  REQUIRE(got.has_value());
  CHECK(*got == *space.at(*best).label());
  CHECK(*got == "id000");
}
