#include "clusterface/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "clusterface/io.hpp"

namespace clusterface {

namespace {

using nlohmann::json;

/// Values read from a --config file. Flags override these; these override the
/// built-in defaults (beta 0.4, gamma 0.1, k 5, seed 0).
struct RunConfigFile {
  std::optional<double> beta;
  std::optional<double> gamma;
  std::optional<int> k;
  std::optional<std::int64_t> seed;
  std::optional<std::string> input;
  std::optional<std::string> pairs;
  std::optional<std::string> probes;
  std::optional<std::string> gallery;
  std::optional<std::string> output;
  std::optional<std::string> format;
};

RunConfigFile load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config file '" + path.string() + "': " + e.what());
  }
  if (!j.is_object()) {
    throw ValidationError("config file '" + path.string() + "' must hold a JSON object");
  }

  RunConfigFile c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "beta") {
        c.beta = value.get<double>();
      } else if (key == "gamma") {
        c.gamma = value.get<double>();
      } else if (key == "k") {
        c.k = value.get<int>();
      } else if (key == "seed") {
        c.seed = value.get<std::int64_t>();
      } else if (key == "tie_break") {
        if (value.get<std::string>() != "lexicographic") {
          throw ValidationError("config: the only supported tie_break is 'lexicographic'");
        }
      } else if (key == "input") {
        c.input = value.get<std::string>();
      } else if (key == "pairs") {
        c.pairs = value.get<std::string>();
      } else if (key == "probes") {
        c.probes = value.get<std::string>();
      } else if (key == "gallery") {
        c.gallery = value.get<std::string>();
      } else if (key == "output") {
        c.output = value.get<std::string>();
      } else if (key == "format") {
        c.format = value.get<std::string>();
      } else {
        throw ValidationError("config file '" + path.string() + "': unknown key '" +
                              key + "'");
      }
    } catch (const json::exception& e) {
      throw ValidationError("config file '" + path.string() + "', key '" + key +
                            "': " + e.what());
    }
  }
  return c;
}

/// Per-subcommand option state shared by the pipeline commands.
struct CommonOptions {
  std::optional<double> beta;
  std::optional<double> gamma;
  std::optional<int> k;
  std::optional<std::int64_t> seed;
  std::optional<std::string> config_path;
  std::optional<std::string> input;
  std::optional<std::string> pairs;
  std::optional<std::string> probes;
  std::optional<std::string> gallery;
  std::optional<std::string> output;
  std::optional<std::string> format;
  bool baseline = false;

  RunConfigFile file;

  void load_file() {
    if (config_path.has_value()) file = load_run_config(*config_path);
  }

  PipelineConfig pipeline_config() const {
    PipelineConfig c;
    if (file.beta) c.beta = *file.beta;
    if (file.gamma) c.gamma = *file.gamma;
    if (file.k) c.k = *file.k;
    if (file.seed) c.seed = *file.seed;
    if (beta) c.beta = *beta;
    if (gamma) c.gamma = *gamma;
    if (k) c.k = *k;
    if (seed) c.seed = *seed;
    c.validate();
    return c;
  }

  std::string resolve(const char* flag_name, const std::optional<std::string>& flag,
                      const std::optional<std::string>& from_file) const {
    if (flag) return *flag;
    if (from_file) return *from_file;
    throw ValidationError(std::string("missing required ") + flag_name);
  }

  std::string input_path() const { return resolve("--input", input, file.input); }
  std::string pairs_path() const { return resolve("--pairs", pairs, file.pairs); }
  std::string probes_path() const { return resolve("--probes", probes, file.probes); }
  std::string gallery_path() const { return resolve("--gallery", gallery, file.gallery); }
  std::string output_path() const { return resolve("--output", output, file.output); }
  std::string output_format() const {
    const std::string f = format ? *format : file.format ? *file.format : "json";
    if (f != "json" && f != "csv") {
      throw ValidationError("format must be 'json' or 'csv'");
    }
    return f;
  }
};

void add_config_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file (flags override it)");
  cmd->add_option("--beta", opts.beta, "verification threshold in cosine distance [0,2]");
  cmd->add_option("--gamma", opts.gamma, "margin of uncertainty, 0 <= gamma <= beta");
  cmd->add_option("--k", opts.k, "neighbor count for the neighborhood vote");
  cmd->add_option("--seed", opts.seed, "deterministic seed echoed into reports");
}

struct SynthOptions {
  SyntheticSpec spec;
  std::string output;
};

int run_synth(const SynthOptions& opts) {
  const SyntheticData data = generate_synthetic(opts.spec);
  save_manifest(data.sets, opts.output);
  return 0;
}

int run_cluster(const CommonOptions& opts, const std::string& constraints_output) {
  const PipelineConfig config = opts.pipeline_config();
  const FaceSetIndex index(load_manifest(opts.input_path()));
  const ClusteringResult result = run_salient_clustering(index, config);
  if (opts.output_format() == "csv") {
    write_merge_log_csv(result, opts.output_path());
  } else {
    write_clustering_json(result, opts.output_path());
  }
  if (!constraints_output.empty()) {
    const ConstraintMatrices matrices =
        build_constraints(result, index, index.labels(), config.k, config.beta);
    write_constraints_csv(matrices, constraints_output);
  }
  return 0;
}

struct SweepOptions {
  double grid_min = 0.05;
  double grid_max = 1.5;
  int grid_steps = 30;
  std::string gamma_policy = "proportional:0.25";
  std::string metrics_output;
  std::string curve_output;
};

std::vector<LabeledPair> label_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const FaceSetIndex& index) {
  std::vector<LabeledPair> out;
  out.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    const auto& la = index.at(a).label();
    const auto& lb = index.at(b).label();
    if (!la || !lb) {
      throw ValidationError("metrics need identity labels on both sides of pair (" + a +
                            ", " + b + ")");
    }
    out.push_back({a, b, *la == *lb});
  }
  return out;
}

int run_verify(const CommonOptions& opts, const SweepOptions& sweep) {
  const PipelineConfig config = opts.pipeline_config();
  const FaceSetIndex index(load_manifest(opts.input_path()));
  const auto pairs = load_pairs(opts.pairs_path());
  for (const auto& [a, b] : pairs) {
    index.at(a);
    index.at(b);
  }

  std::vector<VerificationDecision> decisions;
  decisions.reserve(pairs.size());
  if (opts.baseline) {
    for (const auto& [a, b] : pairs) {
      decisions.push_back(verify_direct(a, b, index, config.beta));
    }
  } else {
    const ClusteringResult result = run_salient_clustering(index, config);
    const ConstraintMatrices matrices =
        build_constraints(result, index, index.labels(), config.k, config.beta);
    for (const auto& [a, b] : pairs) {
      decisions.push_back(verify_clusterface(a, b, matrices, result, index, config));
    }
  }
  write_decisions_csv(decisions, opts.output_path());

  if (!sweep.metrics_output.empty() || !sweep.curve_output.empty()) {
    const std::vector<LabeledPair> labeled = label_pairs(pairs, index);
    const GammaPolicy policy = GammaPolicy::parse(sweep.gamma_policy);
    const std::vector<double> grid =
        make_beta_grid(sweep.grid_min, sweep.grid_max, sweep.grid_steps);
    const VerifierKind kind =
        opts.baseline ? VerifierKind::kDirect : VerifierKind::kClusterFace;
    const RocCurve curve = tar_far_curve(labeled, kind, index, grid, policy, config);
    if (!sweep.curve_output.empty()) write_roc_csv(curve, sweep.curve_output);
    if (!sweep.metrics_output.empty()) {
      MetricsReport report;
      report.task = "verification";
      report.config = config;
      report.gamma_policy = policy.to_string();
      report.pair_count = labeled.size();
      for (const LabeledPair& p : labeled) {
        if (p.genuine) {
          ++report.genuine_count;
        } else {
          ++report.impostor_count;
        }
      }
      report.tar_at_far = curve.tar_at_far;
      report.roc = curve.points;
      write_metrics_json(report, sweep.metrics_output);
    }
  }
  return 0;
}

struct IdentifyOptions {
  int max_rank = 10;
  std::string missing_mate = "exclude";
  std::string metrics_output;
  std::string curve_output;
};

FaceSetIndex joint_space(const std::string& probes_path, const std::string& gallery_path,
                         std::vector<std::string>& probe_ids,
                         std::vector<std::string>& gallery_ids) {
  std::vector<FaceSet> probes = load_manifest(probes_path);
  std::vector<FaceSet> gallery = load_manifest(gallery_path);
  probe_ids.clear();
  gallery_ids.clear();
  for (const FaceSet& s : probes) probe_ids.push_back(s.set_id());
  for (const FaceSet& s : gallery) gallery_ids.push_back(s.set_id());
  std::vector<FaceSet> all = std::move(probes);
  all.insert(all.end(), std::make_move_iterator(gallery.begin()),
             std::make_move_iterator(gallery.end()));
  return FaceSetIndex(std::move(all));  // rejects probe/gallery id collisions
}

int run_identify(const CommonOptions& opts, const IdentifyOptions& id_opts) {
  const PipelineConfig config = opts.pipeline_config();
  std::vector<std::string> probe_ids;
  std::vector<std::string> gallery_ids;
  const FaceSetIndex space =
      joint_space(opts.probes_path(), opts.gallery_path(), probe_ids, gallery_ids);

  ClusteringResult result{{}, {}, config, 0};
  ConstraintMatrices matrices;
  if (!opts.baseline) {
    result = run_salient_clustering(space, config);
    matrices = build_constraints(result, space, space.labels(), config.k, config.beta);
  }

  std::vector<PredictionRow> rows;
  rows.reserve(probe_ids.size());
  for (const std::string& probe : probe_ids) {
    PredictionRow row;
    row.probe = probe;
    row.actual = space.at(probe).label();
    row.predicted = opts.baseline
                        ? identify_direct(probe, gallery_ids, space)
                        : identify_rank1(probe, gallery_ids, matrices, space, config);
    rows.push_back(std::move(row));
  }
  write_predictions_csv(rows, opts.output_path());

  if (!id_opts.metrics_output.empty() || !id_opts.curve_output.empty()) {
    if (id_opts.missing_mate != "exclude" && id_opts.missing_mate != "miss") {
      throw ValidationError("--missing-mate must be 'exclude' or 'miss'");
    }
    const MissingMatePolicy policy = id_opts.missing_mate == "exclude"
                                         ? MissingMatePolicy::kExclude
                                         : MissingMatePolicy::kCountAsMiss;
    const IdentifierKind kind =
        opts.baseline ? IdentifierKind::kDirect : IdentifierKind::kClusterFace;
    const auto cmc =
        cmc_curve(probe_ids, gallery_ids, kind, space, config, id_opts.max_rank, policy);
    if (!id_opts.curve_output.empty()) write_cmc_csv(cmc, id_opts.curve_output);
    if (!id_opts.metrics_output.empty()) {
      MetricsReport report;
      report.task = "identification";
      report.config = config;
      report.probe_count = probe_ids.size();
      report.gallery_size = gallery_ids.size();
      report.cmc = cmc;
      write_metrics_json(report, id_opts.metrics_output);
    }
  }
  return 0;
}

int run_rank(const CommonOptions& opts) {
  const PipelineConfig config = opts.pipeline_config();
  std::vector<std::string> probe_ids;
  std::vector<std::string> gallery_ids;
  const FaceSetIndex space =
      joint_space(opts.probes_path(), opts.gallery_path(), probe_ids, gallery_ids);

  ClusteringResult result{{}, {}, config, 0};
  ConstraintMatrices matrices;
  if (!opts.baseline) {
    result = run_salient_clustering(space, config);
    matrices = build_constraints(result, space, space.labels(), config.k, config.beta);
  }

  std::vector<RankedList> rankings;
  rankings.reserve(probe_ids.size());
  for (const std::string& probe : probe_ids) {
    const std::vector<Neighbor> nn =
        knn_among(probe, space, gallery_ids, config.k, config.beta);
    if (opts.baseline) {
      RankedList plain{probe, {}};
      for (const Neighbor& n : nn) plain.ranked.push_back(n.set_id);
      rankings.push_back(std::move(plain));
    } else {
      rankings.push_back(rank_order_search(probe, nn, matrices, space));
    }
  }
  write_rankings_csv(rankings, opts.output_path());
  return 0;
}

struct BenchOptions {
  std::string sizes = "500,1000,2000,4000";
  SyntheticSpec template_spec;
};

int run_bench(const CommonOptions& opts, const BenchOptions& bench) {
  const PipelineConfig config = opts.pipeline_config();
  SyntheticSpec spec = bench.template_spec;
  if (opts.seed) spec.seed = static_cast<std::uint64_t>(*opts.seed);

  std::vector<std::size_t> sizes;
  std::stringstream stream(bench.sizes);
  std::string token;
  while (std::getline(stream, token, ',')) {
    try {
      const long long v = std::stoll(token);
      if (v < 1) throw std::out_of_range("non-positive");
      sizes.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ValidationError("--sizes must be a comma-separated list of positive integers");
    }
  }

  const ScalingReport report = scaling_bench(sizes, spec, config);
  if (opts.output_format() == "csv") {
    write_scaling_csv(report, opts.output_path());
  } else {
    write_scaling_json(report, spec, config, opts.output_path());
  }
  return 0;
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Salient-cluster constrained face-set recognition pipeline"};
  app.require_subcommand(1);

  SynthOptions synth;
  synth.spec.identities = 4;
  synth.spec.sets_per_identity = 3;
  synth.spec.dimension = 32;
  synth.spec.within_noise = 0.05;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic manifest");
  synth_cmd->add_option("--output", synth.output, "manifest destination (JSONL)")->required();
  synth_cmd->add_option("--seed", synth.spec.seed, "generator seed");
  synth_cmd->add_option("--identities", synth.spec.identities, "number of identities");
  synth_cmd->add_option("--sets-per-identity", synth.spec.sets_per_identity,
                        "face sets per identity (before bridges)");
  synth_cmd->add_option("--dimension", synth.spec.dimension, "embedding dimension");
  synth_cmd->add_option("--within-noise", synth.spec.within_noise,
                        "angular member noise (std-dev, radians)");
  synth_cmd->add_option("--condition-split", synth.spec.condition_split,
                        "fraction of each identity's sets displaced to a second mode");
  synth_cmd->add_option("--bridge-count", synth.spec.bridge_count,
                        "interpolated sets chaining the two modes");

  CommonOptions cluster_opts;
  std::string constraints_output;
  CLI::App* cluster_cmd =
      app.add_subcommand("cluster", "Run salient clustering over a manifest");
  add_config_options(cluster_cmd, cluster_opts);
  cluster_cmd->add_option("--input", cluster_opts.input, "manifest to cluster");
  cluster_cmd->add_option("--output", cluster_opts.output, "result destination");
  cluster_cmd->add_option("--format", cluster_opts.format,
                          "json (full result) or csv (merge log)");
  cluster_cmd->add_option("--constraints-output", constraints_output,
                          "also export the MA/NA constraint maps as CSV");

  CommonOptions verify_opts;
  SweepOptions sweep;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Verify pairs of face sets");
  add_config_options(verify_cmd, verify_opts);
  verify_cmd->add_option("--input", verify_opts.input, "manifest holding every paired set");
  verify_cmd->add_option("--pairs", verify_opts.pairs, "CSV of id_a,id_b lines");
  verify_cmd->add_option("--output", verify_opts.output, "decisions CSV destination");
  verify_cmd->add_flag("--baseline", verify_opts.baseline,
                       "use direct associations instead of the constrained pipeline");
  verify_cmd->add_option("--metrics-output", sweep.metrics_output,
                         "TAR@FAR metrics JSON (needs labeled pairs)");
  verify_cmd->add_option("--curve-output", sweep.curve_output, "ROC sweep CSV");
  verify_cmd->add_option("--grid-min", sweep.grid_min, "sweep lower beta");
  verify_cmd->add_option("--grid-max", sweep.grid_max, "sweep upper beta");
  verify_cmd->add_option("--grid-steps", sweep.grid_steps, "sweep grid points");
  verify_cmd->add_option("--gamma-policy", sweep.gamma_policy,
                         "proportional:<factor> or fixed:<gamma>");

  CommonOptions identify_opts;
  IdentifyOptions id_opts;
  CLI::App* identify_cmd =
      app.add_subcommand("identify", "Closed-set identification of probes against a gallery");
  add_config_options(identify_cmd, identify_opts);
  identify_cmd->add_option("--probes", identify_opts.probes, "probe manifest");
  identify_cmd->add_option("--gallery", identify_opts.gallery, "gallery manifest");
  identify_cmd->add_option("--output", identify_opts.output, "predictions CSV destination");
  identify_cmd->add_flag("--baseline", identify_opts.baseline,
                         "use direct associations instead of the constrained pipeline");
  identify_cmd->add_option("--metrics-output", id_opts.metrics_output, "CMC metrics JSON");
  identify_cmd->add_option("--curve-output", id_opts.curve_output, "CMC curve CSV");
  identify_cmd->add_option("--max-rank", id_opts.max_rank, "largest rank reported");
  identify_cmd->add_option("--missing-mate", id_opts.missing_mate,
                           "probes without a gallery mate: exclude or miss");

  CommonOptions rank_opts;
  CLI::App* rank_cmd =
      app.add_subcommand("rank", "Constrained rank-order search per probe");
  add_config_options(rank_cmd, rank_opts);
  rank_cmd->add_option("--probes", rank_opts.probes, "probe manifest");
  rank_cmd->add_option("--gallery", rank_opts.gallery, "gallery manifest");
  rank_cmd->add_option("--output", rank_opts.output, "rankings CSV destination");
  rank_cmd->add_flag("--baseline", rank_opts.baseline,
                     "plain nearest-neighbor order instead of the constrained search");

  CommonOptions bench_opts;
  BenchOptions bench;
  bench.template_spec.sets_per_identity = 4;
  bench.template_spec.dimension = 16;
  bench.template_spec.within_noise = 0.05;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "Clustering scaling benchmark over synthetic data");
  add_config_options(bench_cmd, bench_opts);
  bench_cmd->add_option("--sizes", bench.sizes, "comma-separated set counts (>= 3)");
  bench_cmd->add_option("--sets-per-identity", bench.template_spec.sets_per_identity,
                        "template sets per identity");
  bench_cmd->add_option("--dimension", bench.template_spec.dimension,
                        "template embedding dimension");
  bench_cmd->add_option("--within-noise", bench.template_spec.within_noise,
                        "template angular noise");
  bench_cmd->add_option("--output", bench_opts.output, "report destination");
  bench_cmd->add_option("--format", bench_opts.format, "json or csv");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("clusterface");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (app.got_subcommand(synth_cmd)) return run_synth(synth);
  if (app.got_subcommand(cluster_cmd)) {
    cluster_opts.load_file();
    return run_cluster(cluster_opts, constraints_output);
  }
  if (app.got_subcommand(verify_cmd)) {
    verify_opts.load_file();
    return run_verify(verify_opts, sweep);
  }
  if (app.got_subcommand(identify_cmd)) {
    identify_opts.load_file();
    return run_identify(identify_opts, id_opts);
  }
  if (app.got_subcommand(rank_cmd)) {
    rank_opts.load_file();
    return run_rank(rank_opts);
  }
  if (app.got_subcommand(bench_cmd)) {
    bench_opts.load_file();
    return run_bench(bench_opts, bench);
  }
  return 1;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  try {
    return dispatch(args);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_command(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_command(args);
}

}  // namespace clusterface
