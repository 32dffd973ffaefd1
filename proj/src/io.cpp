#include "relfuse/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace relfuse::io {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
  json parsed = json::parse(text, nullptr, false);
  if (parsed.is_discarded()) {
    throw InvariantError(ErrorCode::kInvalidInput, "malformed JSON document");
  }
  return parsed;
}

// Wrongly-typed fields surface as nlohmann exceptions; report them as input
// violations.
template <typename Fn>
auto translate_json_errors(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw InvariantError(ErrorCode::kInvalidInput, e.what());
  }
}

void check_version(const json& doc) {
  if (!doc.is_object() || !doc.contains("version") ||
      doc["version"] != kFormatVersion) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "document must carry version \"" +
                             std::string(kFormatVersion) + "\"");
  }
}

double finite_number(const json& value, const char* what) {
  if (!value.is_number()) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         std::string(what) + " must be a number");
  }
  const double number = value.get<double>();
  if (!std::isfinite(number)) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         std::string(what) + " must be finite");
  }
  return number;
}

Eigen::VectorXd vector_field(const json& value, int dims, const char* what) {
  if (!value.is_array() || static_cast<int>(value.size()) != dims) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         std::string(what) + " must be an array of " +
                             std::to_string(dims) + " numbers");
  }
  Eigen::VectorXd out(dims);
  for (int c = 0; c < dims; ++c) out[c] = finite_number(value[c], what);
  return out;
}

json pose_to_frames(const PoseSequence& pose) {
  json frames = json::array();
  for (int t = 0; t < pose.frames(); ++t) {
    json frame = json::array();
    for (int k = 0; k < pose.joint_count(); ++k) {
      json point = json::array();
      for (int c = 0; c < pose.dims(); ++c) point.push_back(pose.at(t, k, c));
      frame.push_back(std::move(point));
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

json sequence_body(const SequenceDoc& doc) {
  json body;
  body["version"] = kFormatVersion;
  body["joint_count"] = doc.tree.joint_count();
  body["dims"] = doc.pose.dims();
  body["units"] = "mm";
  body["parents"] = doc.tree.parent_indices();
  body["frames"] = pose_to_frames(doc.pose);
  return body;
}

SequenceDoc sequence_from_body(const json& body) {
  check_version(body);
  for (const char* field : {"joint_count", "dims", "parents", "frames"}) {
    if (!body.contains(field)) {
      throw InvariantError(ErrorCode::kInvalidInput,
                           "sequence document misses field \"" +
                               std::string(field) + "\"");
    }
  }
  const int joints = body["joint_count"].get<int>();
  const int dims = body["dims"].get<int>();
  if (joints < 1) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "joint_count must be positive");
  }
  if (dims != 2 && dims != 3) {
    throw InvariantError(ErrorCode::kInvalidInput, "dims must be 2 or 3");
  }
  if (!body["parents"].is_array() ||
      static_cast<int>(body["parents"].size()) != joints) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "parents must list one entry per joint");
  }
  std::vector<int> parents;
  parents.reserve(joints);
  for (const json& p : body["parents"]) parents.push_back(p.get<int>());
  const JointTree tree = JointTree::from_parent_indices(parents);
  const TreeCheck check = validate_tree(tree);
  if (!check.ok) throw InvariantError(check.code, check.detail);

  const json& frames = body["frames"];
  if (!frames.is_array() || frames.empty()) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "frames must be a nonempty array");
  }
  PoseSequence pose(static_cast<int>(frames.size()), joints, dims);
  for (int t = 0; t < pose.frames(); ++t) {
    const json& frame = frames[t];
    if (!frame.is_array() || static_cast<int>(frame.size()) != joints) {
      throw InvariantError(ErrorCode::kInvalidInput,
                           "frame " + std::to_string(t) +
                               " must list one point per joint");
    }
    for (int k = 0; k < joints; ++k) {
      pose.set_joint(t, k, vector_field(frame[k], dims, "joint position"));
    }
  }
  return {tree, std::move(pose)};
}

json table_to_json(const RelationTable& table) {
  json rows = json::array();
  for (int t = 0; t < table.frames(); ++t) {
    json row = json::array();
    for (int k = 0; k < table.joint_count(); ++k) {
      if (!table.present(k, t)) {
        row.push_back(nullptr);
        continue;
      }
      json point = json::array();
      const auto value = table.vec(k, t);
      for (int c = 0; c < table.dims(); ++c) point.push_back(value[c]);
      row.push_back(std::move(point));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

RelationTable table_from_json(const json& rows, int joints, int frames,
                              int dims, const char* what) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != frames) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         std::string(what) + " must list one row per frame");
  }
  RelationTable table(joints, frames, dims);
  for (int t = 0; t < frames; ++t) {
    const json& row = rows[t];
    if (!row.is_array() || static_cast<int>(row.size()) != joints) {
      throw InvariantError(ErrorCode::kInvalidInput,
                           std::string(what) + " row " + std::to_string(t) +
                               " must list one entry per joint");
    }
    for (int k = 0; k < joints; ++k) {
      if (row[k].is_null()) continue;
      table.set(k, t, vector_field(row[k], dims, what));
    }
  }
  return table;
}

json kind_to_json(const RelationKind& kind, json& target) {
  if (kind.is_spatial()) {
    target["kind"] = "spatial";
  } else {
    target["kind"] = "temporal";
    target["duration"] = kind.duration;
  }
  return target;
}

RelationKind kind_from_json(const json& source) {
  if (!source.contains("kind") || !source["kind"].is_string()) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "entry misses a \"kind\" string");
  }
  const std::string kind = source["kind"].get<std::string>();
  if (kind == "spatial") return RelationKind::spatial();
  if (kind == "temporal") {
    if (!source.contains("duration")) {
      throw InvariantError(ErrorCode::kInvalidInput,
                           "temporal entry misses a duration");
    }
    return RelationKind::temporal(source["duration"].get<int>());
  }
  throw InvariantError(ErrorCode::kInvalidInput,
                       "kind must be \"spatial\" or \"temporal\"");
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

std::string sequence_to_json(const SequenceDoc& doc) {
  return dump(sequence_body(doc));
}

SequenceDoc sequence_from_json(const std::string& text) {
  return translate_json_errors(
      [&] { return sequence_from_body(parse_json(text)); });
}

void write_sequence_file(const std::filesystem::path& path,
                         const SequenceDoc& doc) {
  atomic_write_text(path, sequence_to_json(doc));
}

SequenceDoc read_sequence_file(const std::filesystem::path& path) {
  return sequence_from_json(read_text_file(path));
}

std::string problem_to_json(const TrackingProblem& problem) {
  json body;
  body["version"] = kFormatVersion;
  body["single_frame"] =
      sequence_body({problem.tree, problem.single_frame});
  body["bones"] = table_to_json(problem.bones);
  json displacements = json::object();
  for (const auto& [duration, table] : problem.displacements) {
    displacements[std::to_string(duration)] = table_to_json(table);
  }
  body["displacements"] = std::move(displacements);
  body["alpha"] = problem.config.alpha;
  body["gamma"] = problem.config.gamma;
  body["durations"] = problem.durations.values();
  return dump(body);
}

TrackingProblem problem_from_json(const std::string& text,
                                  const std::filesystem::path& base_dir) {
  return translate_json_errors([&]() -> TrackingProblem {
  const json body = parse_json(text);
  check_version(body);

  SequenceDoc sequence;
  if (body.contains("single_frame")) {
    sequence = sequence_from_body(body["single_frame"]);
  } else if (body.contains("sequence_ref")) {
    std::filesystem::path ref(body["sequence_ref"].get<std::string>());
    if (ref.is_relative() && !base_dir.empty()) ref = base_dir / ref;
    sequence = read_sequence_file(ref);
  } else {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "problem needs \"single_frame\" or \"sequence_ref\"");
  }
  const int joints = sequence.tree.joint_count();
  const int frames = sequence.pose.frames();
  const int dims = sequence.pose.dims();

  TrackingProblem problem;
  problem.tree = sequence.tree;
  problem.single_frame = std::move(sequence.pose);

  if (!body.contains("bones")) {
    throw InvariantError(ErrorCode::kInvalidInput, "problem misses bones");
  }
  problem.bones = table_from_json(body["bones"], joints, frames, dims, "bones");

  if (!body.contains("durations") || !body["durations"].is_array()) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "problem misses a durations list");
  }
  std::vector<int> durations;
  for (const json& d : body["durations"]) durations.push_back(d.get<int>());
  problem.durations = DurationSet(std::move(durations));

  if (body.contains("displacements")) {
    if (!body["displacements"].is_object()) {
      throw InvariantError(ErrorCode::kInvalidInput,
                           "displacements must map durations to tables");
    }
    for (const auto& [key, value] : body["displacements"].items()) {
      int duration = 0;
      try {
        duration = std::stoi(key);
      } catch (const std::exception&) {
        throw InvariantError(ErrorCode::kInvalidInput,
                             "displacement key \"" + key +
                                 "\" is not a duration");
      }
      problem.displacements.emplace(
          duration,
          table_from_json(value, joints, frames, dims, "displacements"));
    }
  }

  problem.config.alpha =
      body.contains("alpha") ? finite_number(body["alpha"], "alpha") : 1.0;
  if (body.contains("gamma")) {
    for (const json& g : body["gamma"]) {
      problem.config.gamma.push_back(finite_number(g, "gamma"));
    }
  } else {
    problem.config.gamma.assign(problem.durations.values().size(), 1.0);
  }
  problem.validate();
  return problem;
  });
}

void write_problem_file(const std::filesystem::path& path,
                        const TrackingProblem& problem) {
  atomic_write_text(path, problem_to_json(problem));
}

TrackingProblem read_problem_file(const std::filesystem::path& path) {
  return problem_from_json(read_text_file(path), path.parent_path());
}

std::string maps_to_json(const RelationMapSet& maps) {
  json body;
  body["version"] = kFormatVersion;
  body["grid"] = {{"rows", maps.rows},
                  {"cols", maps.cols},
                  {"origin", {maps.transform.origin[0], maps.transform.origin[1]}},
                  {"scale", {maps.transform.scale[0], maps.transform.scale[1]}}};
  body["dims"] = maps.dims;
  json entries = json::array();
  for (const MapEntry& entry : maps.entries) {
    json e;
    e["joint"] = entry.joint;
    kind_to_json(entry.kind, e);
    json values = json::array();
    for (int r = 0; r < entry.map.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < entry.map.cols(); ++c) {
        json point = json::array();
        const auto value = entry.map.at(r, c);
        for (int i = 0; i < entry.map.dims(); ++i) point.push_back(value[i]);
        row.push_back(std::move(point));
      }
      values.push_back(std::move(row));
    }
    e["values"] = std::move(values);
    entries.push_back(std::move(e));
  }
  body["maps"] = std::move(entries);
  return dump(body);
}

RelationMapSet maps_from_json(const std::string& text) {
  return translate_json_errors([&]() -> RelationMapSet {
  const json body = parse_json(text);
  check_version(body);
  if (!body.contains("grid") || !body.contains("dims") ||
      !body.contains("maps")) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "maps document needs grid, dims, and maps fields");
  }
  RelationMapSet maps;
  const json& grid = body["grid"];
  maps.rows = grid["rows"].get<int>();
  maps.cols = grid["cols"].get<int>();
  if (maps.rows < 1 || maps.cols < 1) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "grid shape must be positive");
  }
  const Eigen::VectorXd origin = vector_field(grid["origin"], 2, "grid origin");
  const Eigen::VectorXd scale = vector_field(grid["scale"], 2, "grid scale");
  if (scale[0] == 0.0 || scale[1] == 0.0) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "grid scale must be nonzero");
  }
  maps.transform.origin = origin.head<2>();
  maps.transform.scale = scale.head<2>();
  maps.dims = body["dims"].get<int>();
  if (maps.dims < 1) {
    throw InvariantError(ErrorCode::kInvalidInput, "dims must be positive");
  }

  for (const json& e : body["maps"]) {
    MapEntry entry;
    entry.joint = e["joint"].get<int>();
    entry.kind = kind_from_json(e);
    entry.map = RelationMap(maps.rows, maps.cols, maps.dims, maps.transform);
    const json& values = e["values"];
    if (!values.is_array() || static_cast<int>(values.size()) != maps.rows) {
      throw InvariantError(ErrorCode::kInvalidInput,
                           "map values must list one row per grid row");
    }
    for (int r = 0; r < maps.rows; ++r) {
      const json& row = values[r];
      if (!row.is_array() || static_cast<int>(row.size()) != maps.cols) {
        throw InvariantError(ErrorCode::kInvalidInput,
                             "map row " + std::to_string(r) +
                                 " must list one entry per column");
      }
      for (int c = 0; c < maps.cols; ++c) {
        entry.map.set(r, c, vector_field(row[c], maps.dims, "map value"));
      }
    }
    maps.entries.push_back(std::move(entry));
  }
  return maps;
  });
}

void write_maps_file(const std::filesystem::path& path,
                     const RelationMapSet& maps) {
  atomic_write_text(path, maps_to_json(maps));
}

RelationMapSet read_maps_file(const std::filesystem::path& path) {
  return maps_from_json(read_text_file(path));
}

std::string anchors_to_json(const std::vector<AnchorEntry>& anchors) {
  json body;
  body["version"] = kFormatVersion;
  json entries = json::array();
  for (const AnchorEntry& anchor : anchors) {
    json e;
    e["joint"] = anchor.joint;
    kind_to_json(anchor.kind, e);
    e["point"] = {anchor.point[0], anchor.point[1]};
    entries.push_back(std::move(e));
  }
  body["anchors"] = std::move(entries);
  return dump(body);
}

std::vector<AnchorEntry> anchors_from_json(const std::string& text) {
  return translate_json_errors([&]() -> std::vector<AnchorEntry> {
  const json body = parse_json(text);
  check_version(body);
  if (!body.contains("anchors") || !body["anchors"].is_array()) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "anchors document needs an anchors array");
  }
  std::vector<AnchorEntry> anchors;
  for (const json& e : body["anchors"]) {
    AnchorEntry anchor;
    anchor.joint = e["joint"].get<int>();
    anchor.kind = kind_from_json(e);
    const Eigen::VectorXd point = vector_field(e["point"], 2, "anchor point");
    anchor.point = point.head<2>();
    anchors.push_back(anchor);
  }
  return anchors;
  });
}

void write_anchors_file(const std::filesystem::path& path,
                        const std::vector<AnchorEntry>& anchors) {
  atomic_write_text(path, anchors_to_json(anchors));
}

std::vector<AnchorEntry> read_anchors_file(const std::filesystem::path& path) {
  return anchors_from_json(read_text_file(path));
}

std::string relations_to_json(const std::vector<DecodedRelation>& relations) {
  json body;
  body["version"] = kFormatVersion;
  json entries = json::array();
  for (const DecodedRelation& relation : relations) {
    json e;
    e["joint"] = relation.joint;
    kind_to_json(relation.kind, e);
    json vector = json::array();
    for (int c = 0; c < relation.vector.size(); ++c) {
      vector.push_back(relation.vector[c]);
    }
    e["vector"] = std::move(vector);
    e["total_weight"] = relation.total_weight;
    entries.push_back(std::move(e));
  }
  body["relations"] = std::move(entries);
  return dump(body);
}

std::vector<DecodedRelation> relations_from_json(const std::string& text) {
  return translate_json_errors([&]() -> std::vector<DecodedRelation> {
  const json body = parse_json(text);
  check_version(body);
  if (!body.contains("relations") || !body["relations"].is_array()) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "relations document needs a relations array");
  }
  std::vector<DecodedRelation> relations;
  for (const json& e : body["relations"]) {
    DecodedRelation relation;
    relation.joint = e["joint"].get<int>();
    relation.kind = kind_from_json(e);
    const json& vector = e["vector"];
    relation.vector.resize(static_cast<int>(vector.size()));
    for (int c = 0; c < relation.vector.size(); ++c) {
      relation.vector[c] = finite_number(vector[c], "relation vector");
    }
    relation.total_weight = finite_number(e["total_weight"], "total weight");
    relations.push_back(std::move(relation));
  }
  return relations;
  });
}

void write_relations_file(const std::filesystem::path& path,
                          const std::vector<DecodedRelation>& relations) {
  atomic_write_text(path, relations_to_json(relations));
}

std::vector<DecodedRelation> read_relations_file(
    const std::filesystem::path& path) {
  return relations_from_json(read_text_file(path));
}

namespace {

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace

std::string metric_report_to_csv(const MetricReport& report) {
  std::ostringstream out;
  out << "joint_name_or_index,error_mm\n";
  for (std::size_t k = 0; k < report.per_joint.size(); ++k) {
    out << k << "," << format_number(report.per_joint[k]) << "\n";
  }
  static constexpr const char* kAxes[] = {"x", "y", "z"};
  for (std::size_t c = 0; c < report.per_dimension.size() && c < 3; ++c) {
    out << kAxes[c] << "," << format_number(report.per_dimension[c]) << "\n";
  }
  out << "mean," << format_number(report.joint_error_mm) << "\n";
  return out.str();
}

std::string pcf_to_csv(const std::vector<std::pair<double, double>>& curve) {
  std::ostringstream out;
  out << "threshold_mm,fraction\n";
  for (const auto& [threshold, fraction] : curve) {
    out << format_number(threshold) << "," << format_number(fraction) << "\n";
  }
  return out.str();
}

std::string metric_report_to_json(const MetricReport& report) {
  json body;
  body["version"] = kFormatVersion;
  body["joint_error_mm"] = report.joint_error_mm;
  body["per_joint"] = report.per_joint;
  body["per_dimension"] = report.per_dimension;
  body["bone_error_mm"] =
      report.bone_error_mm ? json(*report.bone_error_mm) : json(nullptr);
  body["displ_error_mm"] =
      report.displ_error_mm ? json(*report.displ_error_mm) : json(nullptr);
  json curve = json::array();
  for (const auto& [threshold, fraction] : report.pcf_curve) {
    curve.push_back({threshold, fraction});
  }
  body["pcf"] = std::move(curve);
  return dump(body);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(ErrorCode::kIoFailure,
                  "cannot open " + path.string() + " for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (!in.good() && !in.eof()) {
    throw IoError(ErrorCode::kIoFailure, "failed reading " + path.string());
  }
  return buffer.str();
}

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& text) {
  const std::filesystem::path temp = path.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError(ErrorCode::kIoFailure,
                    "cannot open " + temp.string() + " for writing");
    }
    out << text;
    out.flush();
    if (!out.good()) {
      throw IoError(ErrorCode::kIoFailure, "failed writing " + temp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp);
    throw IoError(ErrorCode::kIoFailure,
                  "cannot move " + temp.string() + " to " + path.string() +
                      ": " + ec.message());
  }
}

}  // namespace relfuse::io
