#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clusterface/classification.hpp"
#include "clusterface/metrics.hpp"

namespace clusterface {

/// Loads a JSON-Lines manifest: one record per line with a unique set_id, an
/// optional identity label and a non-empty faces array of {vec, score?}.
/// Validates finite components, positive norms, scores in (0, 1] and dimension
/// agreement (inferred from the first record), normalizes member embeddings
/// and computes representatives. Malformed content reports the line number.
std::vector<FaceSet> load_manifest(const std::filesystem::path& path);

/// Writes the manifest format load_manifest accepts. Member vectors are
/// serialized losslessly so a write/read round trip reproduces the sets.
void save_manifest(std::span<const FaceSet> sets, const std::filesystem::path& path);

/// Pair file: one "id_a,id_b" line per pair, no header.
std::vector<std::pair<std::string, std::string>> load_pairs(
    const std::filesystem::path& path);

// Report writers. All output is deterministic: stable key order, fixed float
// formatting at 6 significant digits, '\n' line endings, atomic replace.
void write_merge_log_csv(const ClusteringResult& result, const std::filesystem::path& path);
void write_clustering_json(const ClusteringResult& result, const std::filesystem::path& path);
void write_constraints_csv(const ConstraintMatrices& matrices, const std::filesystem::path& path);
void write_decisions_csv(std::span<const VerificationDecision> decisions,
                         const std::filesystem::path& path);
void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path);
void write_cmc_csv(std::span<const std::pair<int, double>> cmc,
                   const std::filesystem::path& path);
void write_metrics_json(const MetricsReport& report, const std::filesystem::path& path);
void write_rankings_csv(std::span<const RankedList> rankings,
                        const std::filesystem::path& path);

struct PredictionRow {
  std::string probe;
  std::optional<std::string> predicted;
  std::optional<std::string> actual;
};

void write_predictions_csv(std::span<const PredictionRow> rows,
                           const std::filesystem::path& path);

void write_scaling_csv(const ScalingReport& report, const std::filesystem::path& path);
void write_scaling_json(const ScalingReport& report, const SyntheticSpec& spec,
                        const PipelineConfig& config, const std::filesystem::path& path);

/// Locale-independent formatting at 6 significant digits.
std::string format_real(double value);

/// Writes content to a temporary file in the target directory and renames it
/// over the destination, so readers never observe a partial file.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace clusterface
