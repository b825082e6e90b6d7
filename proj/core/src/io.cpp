#include "clusterface/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace clusterface {

namespace {

using nlohmann::json;

[[noreturn]] void line_error(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
  throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + what);
}

/// Rounds to the 6-significant-digit value the reports print.
double round6(double v) {
  const std::string s = format_real(v);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

json config_json(const PipelineConfig& config) {
  json j;
  j["beta"] = round6(config.beta);
  j["gamma"] = round6(config.gamma);
  j["k"] = config.k;
  j["seed"] = config.seed;
  j["tie_break"] = "lexicographic";
  return j;
}

void check_keys(const json& object, std::initializer_list<const char*> allowed,
                const std::filesystem::path& path, std::size_t line) {
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) line_error(path, line, "unknown key '" + key + "'");
  }
}

void validate_set_id(const std::string& id, const std::filesystem::path& path,
                     std::size_t line) {
  if (id.empty()) line_error(path, line, "set_id must be non-empty");
  if (id.find_first_of(",\r\n\"") != std::string::npos) {
    line_error(path, line, "set_id '" + id + "' contains characters not allowed in CSV output");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return std::move(buffer).str();
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  auto [end, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 6);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, end);
}

void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot replace '" + path.string() + "': " + ec.message());
  }
}

std::vector<FaceSet> load_manifest(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<FaceSet> sets;
  std::set<std::string> seen_ids;
  std::string first_id;

  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      line_error(path, line_number, std::string("malformed JSON: ") + e.what());
    }

    try {
      if (!record.is_object()) line_error(path, line_number, "record must be a JSON object");
      check_keys(record, {"set_id", "label", "faces"}, path, line_number);
      if (!record.contains("set_id") || !record["set_id"].is_string()) {
        line_error(path, line_number, "missing string field 'set_id'");
      }
      const std::string set_id = record["set_id"].get<std::string>();
      validate_set_id(set_id, path, line_number);

      std::optional<std::string> label;
      if (record.contains("label")) {
        if (!record["label"].is_string()) {
          line_error(path, line_number, "'label' must be a string");
        }
        label = record["label"].get<std::string>();
        if (label->find_first_of(",\r\n\"") != std::string::npos) {
          line_error(path, line_number, "label contains characters not allowed in CSV output");
        }
      }

      if (!record.contains("faces") || !record["faces"].is_array() ||
          record["faces"].empty()) {
        line_error(path, line_number, "'faces' must be a non-empty array");
      }
      std::vector<FaceSample> samples;
      for (const json& face : record["faces"]) {
        if (!face.is_object()) line_error(path, line_number, "face entry must be an object");
        check_keys(face, {"vec", "score"}, path, line_number);
        if (!face.contains("vec") || !face["vec"].is_array() || face["vec"].empty()) {
          line_error(path, line_number, "'vec' must be a non-empty array of numbers");
        }
        std::vector<double> values;
        values.reserve(face["vec"].size());
        for (const json& x : face["vec"]) {
          if (!x.is_number()) line_error(path, line_number, "'vec' components must be numbers");
          const double v = x.get<double>();
          if (!std::isfinite(v)) {
            line_error(path, line_number, "'vec' components must be finite");
          }
          values.push_back(v);
        }
        std::optional<double> score;
        if (face.contains("score")) {
          if (!face["score"].is_number()) {
            line_error(path, line_number, "'score' must be a number");
          }
          score = face["score"].get<double>();
          if (!std::isfinite(*score) || *score <= 0.0 || *score > 1.0) {
            line_error(path, line_number, "'score' must be in (0, 1]");
          }
        }
        samples.push_back({Embedding(std::move(values)), score});
      }

      FaceSet set(set_id, std::move(label), std::move(samples));
      if (sets.empty()) {
        first_id = set.set_id();
      } else if (set.dimension() != sets.front().dimension()) {
        line_error(path, line_number,
                   "dimension mismatch between sets '" + first_id + "' and '" +
                       set.set_id() + "': " + std::to_string(sets.front().dimension()) +
                       " vs " + std::to_string(set.dimension()));
      }
      if (!seen_ids.insert(set.set_id()).second) {
        line_error(path, line_number, "duplicate set_id '" + set.set_id() + "'");
      }
      sets.push_back(std::move(set));
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception& e) {
      line_error(path, line_number, e.what());
    }
  }
  if (sets.empty()) {
    throw ValidationError(path.string() + ": manifest contains no records");
  }
  return sets;
}

void save_manifest(std::span<const FaceSet> sets, const std::filesystem::path& path) {
  std::string out;
  for (const FaceSet& s : sets) {
    json record;
    record["set_id"] = s.set_id();
    if (s.label().has_value()) record["label"] = *s.label();
    json faces = json::array();
    for (const FaceSample& m : s.members()) {
      json face;
      // Full precision: the manifest is the dataset, not a report.
      face["vec"] = std::vector<double>(m.embedding.values().begin(),
                                        m.embedding.values().end());
      if (m.score.has_value()) face["score"] = *m.score;
      faces.push_back(std::move(face));
    }
    record["faces"] = std::move(faces);
    out += record.dump();
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::vector<std::pair<std::string, std::string>> load_pairs(
    const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      line_error(path, line_number, "expected exactly two comma-separated ids");
    }
    std::string a = line.substr(0, comma);
    std::string b = line.substr(comma + 1);
    if (a.empty() || b.empty()) {
      line_error(path, line_number, "pair ids must be non-empty");
    }
    pairs.emplace_back(std::move(a), std::move(b));
  }
  if (pairs.empty()) {
    throw ValidationError(path.string() + ": pair file contains no pairs");
  }
  return pairs;
}

void write_merge_log_csv(const ClusteringResult& result,
                         const std::filesystem::path& path) {
  std::string out = "iteration,left,right,distance,result\n";
  for (const MergeEvent& e : result.merge_log()) {
    out += std::to_string(e.iteration);
    out += ',';
    out += std::to_string(e.left);
    out += ',';
    out += std::to_string(e.right);
    out += ',';
    out += format_real(e.distance);
    out += ',';
    out += std::to_string(e.result);
    out += '\n';
  }
  atomic_write_file(path, out);
}

void write_clustering_json(const ClusteringResult& result,
                           const std::filesystem::path& path) {
  json j;
  j["config"] = config_json(result.config());
  j["distance_evaluations"] = result.distance_evaluations();
  json clusters = json::array();
  for (const SalientCluster& c : result.clusters()) {
    json jc;
    jc["index"] = c.cluster_index;
    jc["members"] = c.member_set_ids;
    jc["size"] = c.size();
    json centroid = json::array();
    for (double x : c.centroid) centroid.push_back(round6(x));
    jc["centroid"] = std::move(centroid);
    clusters.push_back(std::move(jc));
  }
  j["clusters"] = std::move(clusters);
  json log = json::array();
  for (const MergeEvent& e : result.merge_log()) {
    json je;
    je["iteration"] = e.iteration;
    je["left"] = e.left;
    je["right"] = e.right;
    je["distance"] = round6(e.distance);
    je["result"] = e.result;
    log.push_back(std::move(je));
  }
  j["merge_log"] = std::move(log);
  atomic_write_file(path, j.dump(2) + "\n");
}

void write_constraints_csv(const ConstraintMatrices& matrices,
                           const std::filesystem::path& path) {
  std::string out = "i,j,kind,label\n";
  for (const auto& [key, label] : matrices.ma_entries()) {
    out += key.first + ',' + key.second + ",MA," + label.label + '\n';
  }
  for (const auto& [key, label] : matrices.na_entries()) {
    out += key.first + ',' + key.second + ",NA," + label.label + '\n';
  }
  atomic_write_file(path, out);
}

void write_decisions_csv(std::span<const VerificationDecision> decisions,
                         const std::filesystem::path& path) {
  std::string out = "i,j,same_identity\n";
  for (const VerificationDecision& d : decisions) {
    out += d.pair.first + ',' + d.pair.second + ',' +
           (d.same_identity ? "true" : "false") + '\n';
  }
  atomic_write_file(path, out);
}

void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path) {
  std::string out = "threshold,far,tar\n";
  for (const RocPoint& p : curve.points) {
    out += format_real(p.beta) + ',' + format_real(p.far) + ',' + format_real(p.tar) + '\n';
  }
  atomic_write_file(path, out);
}

void write_cmc_csv(std::span<const std::pair<int, double>> cmc,
                   const std::filesystem::path& path) {
  std::string out = "rank,accuracy\n";
  for (const auto& [rank, accuracy] : cmc) {
    out += std::to_string(rank) + ',' + format_real(accuracy) + '\n';
  }
  atomic_write_file(path, out);
}

void write_metrics_json(const MetricsReport& report, const std::filesystem::path& path) {
  json j;
  j["task"] = report.task;
  j["config"] = config_json(report.config);
  json counts;
  if (report.task == "verification") {
    j["gamma_policy"] = report.gamma_policy;
    counts["pairs"] = report.pair_count;
    counts["genuine"] = report.genuine_count;
    counts["impostor"] = report.impostor_count;
    json tar;
    for (const auto& [target, value] : report.tar_at_far) {
      tar[format_real(target)] = round6(value);
    }
    j["tar_at_far"] = std::move(tar);
    json roc = json::array();
    for (const RocPoint& p : report.roc) {
      json jp;
      jp["beta"] = round6(p.beta);
      jp["gamma"] = round6(p.gamma);
      jp["far"] = round6(p.far);
      jp["tar"] = round6(p.tar);
      roc.push_back(std::move(jp));
    }
    j["roc"] = std::move(roc);
  } else {
    counts["probes"] = report.probe_count;
    counts["gallery_size"] = report.gallery_size;
    json cmc = json::array();
    for (const auto& [rank, accuracy] : report.cmc) {
      json jp;
      jp["rank"] = rank;
      jp["accuracy"] = round6(accuracy);
      cmc.push_back(std::move(jp));
    }
    j["cmc"] = std::move(cmc);
  }
  j["counts"] = std::move(counts);
  atomic_write_file(path, j.dump(2) + "\n");
}

void write_rankings_csv(std::span<const RankedList> rankings,
                        const std::filesystem::path& path) {
  std::string out = "probe,rank,neighbor\n";
  for (const RankedList& r : rankings) {
    for (std::size_t i = 0; i < r.ranked.size(); ++i) {
      out += r.probe + ',' + std::to_string(i + 1) + ',' + r.ranked[i] + '\n';
    }
  }
  atomic_write_file(path, out);
}

void write_predictions_csv(std::span<const PredictionRow> rows,
                           const std::filesystem::path& path) {
  std::string out = "probe,predicted,actual\n";
  for (const PredictionRow& r : rows) {
    out += r.probe + ',' + r.predicted.value_or("") + ',' + r.actual.value_or("") + '\n';
  }
  atomic_write_file(path, out);
}

void write_scaling_csv(const ScalingReport& report, const std::filesystem::path& path) {
  std::string out = "sets,distance_evaluations,wall_seconds\n";
  for (const ScalingRow& r : report.rows) {
    out += std::to_string(r.sets) + ',' + std::to_string(r.distance_evaluations) +
           ',' + format_real(r.wall_seconds) + '\n';
  }
  atomic_write_file(path, out);
}

void write_scaling_json(const ScalingReport& report, const SyntheticSpec& spec,
                        const PipelineConfig& config, const std::filesystem::path& path) {
  json j;
  j["config"] = config_json(config);
  json jspec;
  jspec["sets_per_identity"] = spec.sets_per_identity;
  jspec["dimension"] = spec.dimension;
  jspec["within_noise"] = round6(spec.within_noise);
  jspec["condition_split"] = round6(spec.condition_split);
  jspec["bridge_count"] = spec.bridge_count;
  jspec["seed"] = spec.seed;
  j["template"] = std::move(jspec);
  j["loglog_slope"] = round6(report.loglog_slope);
  json rows = json::array();
  for (const ScalingRow& r : report.rows) {
    json jr;
    jr["sets"] = r.sets;
    jr["distance_evaluations"] = r.distance_evaluations;
    jr["wall_seconds"] = round6(r.wall_seconds);
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  atomic_write_file(path, j.dump(2) + "\n");
}

}  // namespace clusterface
