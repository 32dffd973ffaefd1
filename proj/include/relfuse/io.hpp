#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "relfuse/metrics.hpp"
#include "relfuse/relations.hpp"
#include "relfuse/skeleton.hpp"
#include "relfuse/tracker.hpp"

namespace relfuse::io {

inline constexpr const char* kFormatVersion = "1";

// All writers emit whole files atomically (temp file + rename) and serialize
// doubles with round-trip precision. Parents are encoded 0-based with -1 for
// the root.

struct SequenceDoc {
  JointTree tree;
  PoseSequence pose;
};

std::string sequence_to_json(const SequenceDoc& doc);
SequenceDoc sequence_from_json(const std::string& text);
void write_sequence_file(const std::filesystem::path& path,
                         const SequenceDoc& doc);
SequenceDoc read_sequence_file(const std::filesystem::path& path);

std::string problem_to_json(const TrackingProblem& problem);
// `base_dir` resolves a relative "sequence_ref"; pass the problem file's
// directory.
TrackingProblem problem_from_json(const std::string& text,
                                  const std::filesystem::path& base_dir = {});
void write_problem_file(const std::filesystem::path& path,
                        const TrackingProblem& problem);
TrackingProblem read_problem_file(const std::filesystem::path& path);

// Relation maps awaiting decoding: one grid per (joint, kind, duration).
struct MapEntry {
  int joint = 0;
  RelationKind kind = RelationKind::spatial();
  RelationMap map;
};

struct RelationMapSet {
  GridTransform transform;
  int rows = 0;
  int cols = 0;
  int dims = 0;
  std::vector<MapEntry> entries;
};

std::string maps_to_json(const RelationMapSet& maps);
RelationMapSet maps_from_json(const std::string& text);
void write_maps_file(const std::filesystem::path& path,
                     const RelationMapSet& maps);
RelationMapSet read_maps_file(const std::filesystem::path& path);

// Predicted image-plane locations of the related joints, matched to map
// entries by (joint, kind, duration).
struct AnchorEntry {
  int joint = 0;
  RelationKind kind = RelationKind::spatial();
  Eigen::Vector2d point{0.0, 0.0};
};

std::string anchors_to_json(const std::vector<AnchorEntry>& anchors);
std::vector<AnchorEntry> anchors_from_json(const std::string& text);
void write_anchors_file(const std::filesystem::path& path,
                        const std::vector<AnchorEntry>& anchors);
std::vector<AnchorEntry> read_anchors_file(const std::filesystem::path& path);

// Decoded relation vectors with the total weight of each map.
struct DecodedRelation {
  int joint = 0;
  RelationKind kind = RelationKind::spatial();
  Eigen::VectorXd vector;
  double total_weight = 0.0;
};

std::string relations_to_json(const std::vector<DecodedRelation>& relations);
std::vector<DecodedRelation> relations_from_json(const std::string& text);
void write_relations_file(const std::filesystem::path& path,
                          const std::vector<DecodedRelation>& relations);
std::vector<DecodedRelation> read_relations_file(
    const std::filesystem::path& path);

// Metric report emission. CSV columns: joint_name_or_index,error_mm with one
// row per joint, one per dimension (x/y/z), and a final mean row.
std::string metric_report_to_csv(const MetricReport& report);
std::string pcf_to_csv(const std::vector<std::pair<double, double>>& curve);
std::string metric_report_to_json(const MetricReport& report);

std::string read_text_file(const std::filesystem::path& path);
void atomic_write_text(const std::filesystem::path& path,
                       const std::string& text);

}  // namespace relfuse::io
