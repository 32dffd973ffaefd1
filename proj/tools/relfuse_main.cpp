// relfuse command-line front end: synthesize sequences and tracking problems,
// solve them, evaluate metrics, and decode relation maps.
//
// Exit codes: 0 success, 2 usage, 3 I/O failure, 4 input invariant violation,
// 5 solver failure.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "relfuse/io.hpp"
#include "relfuse/metrics.hpp"
#include "relfuse/relations.hpp"
#include "relfuse/skeleton.hpp"
#include "relfuse/synth.hpp"
#include "relfuse/tracker.hpp"

namespace {

using namespace relfuse;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvariant = 4;
constexpr int kExitSolver = 5;

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  std::exit(kExitUsage);
}

int worker_count() {
  if (const char* env = std::getenv("RELFUSE_THREADS")) {
    const int requested = std::atoi(env);
    if (requested >= 1) return requested;
  }
  const unsigned hardware = std::thread::hardware_concurrency();
  return hardware == 0 ? 1 : static_cast<int>(hardware);
}

// Runs fn(i) for i in [0, count) on up to worker_count() threads. Exceptions
// are rethrown on the caller thread.
void parallel_for(int count, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), std::max(count, 1));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
        next.store(count);
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

Range parse_range(const std::string& text, const std::string& flag) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const double value = std::stod(text);
      return {value, value};
    }
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    usage_error("invalid " + flag + " value '" + text +
                "': expected NUMBER or LO:HI");
  }
}

JointTree parse_joints(const std::string& text) {
  const auto colon = text.find(':');
  const std::string shape = text.substr(0, colon);
  if (shape == "parents") {
    if (colon == std::string::npos) {
      usage_error("--joints parents: needs a comma-separated index list");
    }
    std::vector<int> parents;
    std::stringstream stream(text.substr(colon + 1));
    std::string item;
    while (std::getline(stream, item, ',')) {
      try {
        parents.push_back(std::stoi(item));
      } catch (const std::exception&) {
        usage_error("invalid parent index '" + item + "'");
      }
    }
    return JointTree::from_parent_indices(parents);
  }
  if (colon == std::string::npos) {
    usage_error("invalid --joints value '" + text +
                "': expected chain:K, star:K, or parents:LIST");
  }
  int count = 0;
  try {
    count = std::stoi(text.substr(colon + 1));
  } catch (const std::exception&) {
    count = 0;
  }
  if (count < 1) usage_error("--joints needs a positive joint count");
  if (shape == "chain") return JointTree::chain(count);
  if (shape == "star") return JointTree::star(count);
  usage_error("unknown joint shape '" + shape +
              "': expected chain, star, or parents");
}

DurationSet parse_durations(const std::string& preset,
                            const std::string& custom) {
  if (!custom.empty()) {
    std::vector<int> durations;
    std::stringstream stream(custom);
    std::string item;
    while (std::getline(stream, item, ',')) {
      try {
        durations.push_back(std::stoi(item));
      } catch (const std::exception&) {
        usage_error("invalid duration '" + item + "'");
      }
    }
    return DurationSet(std::move(durations));
  }
  const auto set = DurationSet::preset(preset);
  if (!set) {
    usage_error("unknown preset '" + preset +
                "': expected one of {f, fb, mf, mfb}");
  }
  return *set;
}

std::vector<double> parse_gamma(const std::string& text, int durations) {
  std::vector<double> gamma;
  if (text.empty()) {
    gamma.assign(durations, 1.0);
    return gamma;
  }
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      gamma.push_back(std::stod(item));
    } catch (const std::exception&) {
      usage_error("invalid gamma '" + item + "'");
    }
  }
  if (gamma.size() == 1) gamma.assign(durations, gamma[0]);
  if (static_cast<int>(gamma.size()) != durations) {
    usage_error("--gamma needs 1 or " + std::to_string(durations) +
                " values, got " + std::to_string(gamma.size()));
  }
  return gamma;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(
    const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const std::uint64_t seed = std::stoull(text);
      return {seed, seed};
    }
    const std::uint64_t first = std::stoull(text.substr(0, dots));
    const std::uint64_t last = std::stoull(text.substr(dots + 2));
    if (last < first) usage_error("--seeds range must be ascending");
    return {first, last};
  } catch (const std::exception&) {
    usage_error("invalid --seeds value '" + text + "': expected A or A..B");
  }
}

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

// Shared synth flags for `synth` and batch-mode `track`.
struct SynthOptions {
  std::string joints = "chain:5";
  int frames = 50;
  int dims = 3;
  double fps = 8.0;
  std::string bone_mm = "100:300";
  std::string amp_mm = "20:80";
  std::string amp_rad = "0.05:0.3";
  std::string freq_hz = "0.1:0.5";
  double sigma_single = 0.0;
  double sigma_bone = 0.0;
  double sigma_displ = 0.0;

  void attach(CLI::App& cmd) {
    cmd.add_option("--joints", joints, "Tree: chain:K, star:K, or parents:LIST");
    cmd.add_option("--frames", frames, "Number of frames");
    cmd.add_option("--dims", dims, "Coordinate dimensions (2 or 3)");
    cmd.add_option("--fps", fps, "Frame rate tag: 25, 8, or 2.5");
    cmd.add_option("--bone-mm", bone_mm, "Bone length range LO:HI in mm");
    cmd.add_option("--amp-mm", amp_mm, "Root translation amplitude range in mm");
    cmd.add_option("--amp-rad", amp_rad, "Joint angle amplitude range in rad");
    cmd.add_option("--freq-hz", freq_hz, "Motion frequency range in Hz");
    cmd.add_option("--sigma-single", sigma_single, "Single-frame noise in mm");
    cmd.add_option("--sigma-bone", sigma_bone, "Bone prediction noise in mm");
    cmd.add_option("--sigma-displ", sigma_displ,
                   "Displacement prediction noise in mm");
  }

  MotionSpec motion_spec(std::uint64_t seed) const {
    const auto rate = parse_frame_rate(fps);
    if (!rate) {
      usage_error("invalid --fps value " + format_number(fps) +
                  ": valid rates are " + kFrameRateChoices);
    }
    MotionSpec spec;
    spec.tree = parse_joints(joints);
    spec.frames = frames;
    spec.dims = dims;
    spec.rate = *rate;
    spec.root_amplitude_mm = parse_range(amp_mm, "--amp-mm");
    spec.angle_amplitude_rad = parse_range(amp_rad, "--amp-rad");
    spec.frequency_hz = parse_range(freq_hz, "--freq-hz");
    spec.seed = seed;
    spec.bone_lengths_mm =
        sample_bone_lengths(spec.tree, parse_range(bone_mm, "--bone-mm"), seed);
    return spec;
  }

  NoiseSpec noise_spec(std::uint64_t seed) const {
    return {sigma_single, sigma_bone, sigma_displ, seed};
  }
};

int run_synth(const SynthOptions& options, std::uint64_t seed,
              std::uint64_t noise_seed, const DurationSet& durations,
              double alpha, const std::string& gamma_text,
              const std::string& out, const std::string& problem_out) {
  const MotionSpec spec = options.motion_spec(seed);
  const PoseSequence ground_truth = generate_sequence(spec);
  io::write_sequence_file(out, {spec.tree, ground_truth});

  TrackerConfig config;
  config.alpha = alpha;
  config.gamma = parse_gamma(gamma_text, durations.size());
  PredictionSet predictions = corrupt_predictions(
      spec.tree, ground_truth, durations, options.noise_spec(noise_seed));
  const TrackingProblem problem =
      make_problem(spec.tree, std::move(predictions), durations, config);

  std::string problem_path = problem_out;
  if (problem_path.empty()) {
    std::filesystem::path derived(out);
    derived.replace_extension();
    problem_path = derived.string() + "_problem.json";
  }
  io::write_problem_file(problem_path, problem);
  std::cout << "wrote " << out << " and " << problem_path << "\n";
  return 0;
}

struct BatchRow {
  std::uint64_t seed = 0;
  double joint_error_single = 0.0;
  double joint_error_tracked = 0.0;
  double objective = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

int run_track_batch(const SynthOptions& options, std::uint64_t first_seed,
                    std::uint64_t last_seed, const DurationSet& durations,
                    double alpha, const std::string& gamma_text,
                    const std::string& report_path) {
  const int count = static_cast<int>(last_seed - first_seed + 1);
  std::vector<BatchRow> rows(count);
  TrackerConfig config;
  config.alpha = alpha;
  config.gamma = parse_gamma(gamma_text, durations.size());

  parallel_for(count, [&](int i) {
    const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(i);
    const MotionSpec spec = options.motion_spec(seed);
    const PoseSequence ground_truth = generate_sequence(spec);
    PredictionSet predictions = corrupt_predictions(
        spec.tree, ground_truth, durations, options.noise_spec(seed));
    const double single_error =
        joint_error(predictions.single_frame, ground_truth).joint_error_mm;
    const TrackingProblem problem =
        make_problem(spec.tree, std::move(predictions), durations, config);
    const TrackedResult result = solve_tracking(problem);
    rows[i] = {seed,
               single_error,
               joint_error(result.solution, ground_truth).joint_error_mm,
               result.objective,
               result.residual_norm,
               result.iterations};
  });

  std::ostringstream csv;
  csv << "seed,joint_error_single_mm,joint_error_tracked_mm,objective,"
         "residual,iterations\n";
  double mean_single = 0.0;
  double mean_tracked = 0.0;
  for (const BatchRow& row : rows) {
    csv << row.seed << "," << format_number(row.joint_error_single) << ","
        << format_number(row.joint_error_tracked) << ","
        << format_number(row.objective) << "," << format_number(row.residual)
        << "," << row.iterations << "\n";
    mean_single += row.joint_error_single;
    mean_tracked += row.joint_error_tracked;
  }
  io::atomic_write_text(report_path, csv.str());
  std::cout << "seeds " << first_seed << ".." << last_seed
            << "  mean joint error: single "
            << format_number(mean_single / count) << " mm, tracked "
            << format_number(mean_tracked / count) << " mm\n"
            << "wrote " << report_path << "\n";
  return 0;
}

std::string preset_name_for(const DurationSet& durations) {
  for (const char* name : {"f", "fb", "mf", "mfb"}) {
    if (*DurationSet::preset(name) == durations) return name;
  }
  return "custom";
}

int run_track_single(const std::string& problem_path,
                     const std::string& preset, const std::string& custom,
                     std::optional<double> alpha, const std::string& gamma_text,
                     const std::string& out, const std::string& report_path) {
  TrackingProblem problem = io::read_problem_file(problem_path);
  if (!preset.empty() || !custom.empty()) {
    const DurationSet durations =
        parse_durations(preset.empty() ? "f" : preset, custom);
    std::vector<double> gamma;
    if (!gamma_text.empty()) gamma = parse_gamma(gamma_text, durations.size());
    problem = with_durations(problem, durations, std::move(gamma));
  } else if (!gamma_text.empty()) {
    problem.config.gamma =
        parse_gamma(gamma_text, problem.durations.size());
  }
  if (alpha) problem.config.alpha = *alpha;

  const auto start = std::chrono::steady_clock::now();
  const TrackedResult result = solve_tracking(problem);
  const double wall_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - start)
          .count();

  io::write_sequence_file(out, {problem.tree, result.solution});

  std::ostringstream durations_text;
  for (int n = 0; n < problem.durations.size(); ++n) {
    if (n) durations_text << ",";
    durations_text << problem.durations.values()[n];
  }
  std::ostringstream report;
  report << "{\n"
         << "  \"version\": \"1\",\n"
         << "  \"objective\": " << format_number(result.objective) << ",\n"
         << "  \"residual\": " << format_number(result.residual_norm) << ",\n"
         << "  \"iterations\": " << result.iterations << ",\n"
         << "  \"wall_ms\": " << format_number(wall_ms) << ",\n"
         << "  \"preset\": \"" << preset_name_for(problem.durations) << "\",\n"
         << "  \"durations\": [" << durations_text.str() << "],\n"
         << "  \"alpha\": " << format_number(problem.config.alpha) << "\n"
         << "}\n";
  if (!report_path.empty()) {
    io::atomic_write_text(report_path, report.str());
  }
  std::cout << "objective " << format_number(result.objective) << ", residual "
            << format_number(result.residual_norm) << ", wall "
            << format_number(wall_ms) << " ms\nwrote " << out << "\n";
  return 0;
}

int run_eval(const std::string& pred_path, const std::string& gt_path,
             const std::string& csv_path, const std::string& json_path,
             const std::string& pcf_path, const std::string& thresholds_text,
             bool with_bones, const std::string& problem_path,
             int displ_duration) {
  const io::SequenceDoc predicted = io::read_sequence_file(pred_path);
  const io::SequenceDoc ground_truth = io::read_sequence_file(gt_path);
  if (predicted.tree != ground_truth.tree) {
    throw InvariantError(ErrorCode::kShapeMismatch,
                         "prediction and ground truth use different trees");
  }

  MetricReport report = joint_error(predicted.pose, ground_truth.pose);
  if (with_bones) {
    report.bone_error_mm =
        bone_error(compute_bone_vectors(predicted.tree, predicted.pose),
                   compute_bone_vectors(ground_truth.tree, ground_truth.pose));
  }
  if (!problem_path.empty()) {
    const TrackingProblem problem = io::read_problem_file(problem_path);
    report.bone_error_mm = bone_error(
        problem.bones,
        compute_bone_vectors(ground_truth.tree, ground_truth.pose));
    const auto it = problem.displacements.find(displ_duration);
    if (it == problem.displacements.end()) {
      throw InvariantError(ErrorCode::kInvalidInput,
                           "problem has no displacement block for duration " +
                               std::to_string(displ_duration));
    }
    report.displ_error_mm =
        displ_error(it->second, ground_truth.pose, displ_duration);
  }

  if (!thresholds_text.empty()) {
    std::vector<double> thresholds;
    std::stringstream stream(thresholds_text);
    std::string item;
    while (std::getline(stream, item, ',')) {
      try {
        thresholds.push_back(std::stod(item));
      } catch (const std::exception&) {
        usage_error("invalid threshold '" + item + "'");
      }
    }
    report.pcf_curve = pcf(predicted.pose, ground_truth.pose, thresholds);
  }

  if (!csv_path.empty()) {
    io::atomic_write_text(csv_path, io::metric_report_to_csv(report));
  }
  if (!json_path.empty()) {
    io::atomic_write_text(json_path, io::metric_report_to_json(report));
  }
  if (!pcf_path.empty()) {
    io::atomic_write_text(pcf_path, io::pcf_to_csv(report.pcf_curve));
  }
  std::cout << "joint error " << format_number(report.joint_error_mm)
            << " mm\n";
  if (report.bone_error_mm) {
    std::cout << "bone error " << format_number(*report.bone_error_mm)
              << " mm\n";
  }
  if (report.displ_error_mm) {
    std::cout << "displ error " << format_number(*report.displ_error_mm)
              << " mm\n";
  }
  return 0;
}

std::vector<WeightSpec> parse_ensemble(const std::string& text) {
  std::vector<WeightSpec> specs;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto colon = item.find(':');
    const std::string family_name = item.substr(0, colon);
    const auto family = parse_weight_family(family_name);
    if (!family) usage_error("unknown weight family '" + family_name + "'");
    WeightSpec spec{*family, 0.0};
    if (colon != std::string::npos) {
      try {
        spec.beta = std::stod(item.substr(colon + 1));
      } catch (const std::exception&) {
        usage_error("invalid beta in ensemble member '" + item + "'");
      }
    }
    specs.push_back(spec);
  }
  if (specs.empty()) usage_error("--ensemble needs at least one member");
  return specs;
}

int run_decode(const std::string& maps_path, const std::string& anchors_path,
               const std::string& family_name, double beta,
               const std::string& ensemble_text, const std::string& out) {
  const io::RelationMapSet maps = io::read_maps_file(maps_path);
  const std::vector<io::AnchorEntry> anchors =
      io::read_anchors_file(anchors_path);

  std::vector<WeightSpec> specs;
  if (!ensemble_text.empty()) {
    specs = parse_ensemble(ensemble_text);
  } else {
    const auto family = parse_weight_family(family_name);
    if (!family) {
      usage_error("unknown --family '" + family_name +
                  "': expected binary, gaussian, linear, exponential, "
                  "joint-one, or full");
    }
    specs.push_back({*family, beta});
  }

  const auto find_anchor = [&](const io::MapEntry& entry) -> Eigen::Vector2d {
    for (const io::AnchorEntry& anchor : anchors) {
      if (anchor.joint == entry.joint && anchor.kind == entry.kind) {
        return anchor.point;
      }
    }
    throw InvariantError(ErrorCode::kInvalidInput,
                         "no anchor for joint " + std::to_string(entry.joint));
  };

  std::vector<io::DecodedRelation> decoded;
  std::vector<int> zero_weight_joints;
  for (const io::MapEntry& entry : maps.entries) {
    const DistanceMap distances = build_distance_map(
        find_anchor(entry), maps.rows, maps.cols, maps.transform);
    double total = 0.0;
    bool zero = false;
    for (const WeightSpec& spec : specs) {
      const WeightMap weights = build_weight_map(distances, spec);
      const double member_total = weights.total();
      if (member_total <= 0.0) zero = true;
      total += member_total;
    }
    if (zero) {
      zero_weight_joints.push_back(entry.joint);
      continue;
    }
    io::DecodedRelation relation;
    relation.joint = entry.joint;
    relation.kind = entry.kind;
    relation.vector = specs.size() == 1
                          ? weighted_inference(
                                entry.map, build_weight_map(distances, specs[0]))
                          : ensemble_inference(entry.map, distances, specs);
    relation.total_weight = total;
    decoded.push_back(std::move(relation));
  }
  if (!zero_weight_joints.empty()) {
    std::ostringstream joints;
    for (std::size_t i = 0; i < zero_weight_joints.size(); ++i) {
      if (i) joints << ", ";
      joints << zero_weight_joints[i];
    }
    throw InvariantError(ErrorCode::kZeroTotalWeight,
                         "weight map sums to zero for joints: " + joints.str());
  }

  io::write_relations_file(out, decoded);
  std::cout << "decoded " << decoded.size() << " relation vectors\nwrote "
            << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatiotemporal joint-relation fusion for pose tracking"};
  app.require_subcommand(1);

  // synth
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate a seeded synthetic sequence and tracking problem");
  SynthOptions synth_options;
  synth_options.attach(*synth_cmd);
  std::uint64_t synth_seed = 0;
  std::string synth_noise_seed;
  std::string synth_preset = "mfb";
  std::string synth_custom_durations;
  double synth_alpha = 1.0;
  std::string synth_gamma;
  std::string synth_out = "sequence.json";
  std::string synth_problem_out;
  synth_cmd->add_option("--seed", synth_seed, "Motion seed");
  synth_cmd->add_option("--noise-seed", synth_noise_seed,
                        "Noise seed (defaults to --seed)");
  synth_cmd->add_option("--preset", synth_preset,
                        "Duration preset: f, fb, mf, or mfb");
  synth_cmd->add_option("--durations", synth_custom_durations,
                        "Custom duration list, e.g. 1,-1,2");
  synth_cmd->add_option("--alpha", synth_alpha, "Bone term weight");
  synth_cmd->add_option("--gamma", synth_gamma,
                        "Displacement weights (1 or N values)");
  synth_cmd->add_option("--out", synth_out, "Ground-truth sequence path");
  synth_cmd->add_option("--problem-out", synth_problem_out,
                        "Problem path (default: <out>_problem.json)");

  // track
  auto* track_cmd = app.add_subcommand(
      "track", "Solve a tracking problem, or run a seeded batch");
  SynthOptions track_options;
  track_options.attach(*track_cmd);
  std::string track_problem;
  std::string track_seeds;
  std::string track_preset;
  std::string track_custom_durations;
  double track_alpha_value = 1.0;
  std::string track_gamma;
  std::string track_out = "tracked.json";
  std::string track_report;
  track_cmd->add_option("--problem", track_problem, "Problem file to solve");
  track_cmd->add_option("--seeds", track_seeds,
                        "Batch mode: seed range A..B (uses synth flags)");
  track_cmd->add_option("--preset", track_preset,
                        "Duration preset: f, fb, mf, or mfb");
  track_cmd->add_option("--durations", track_custom_durations,
                        "Custom duration list");
  auto* track_alpha_option =
      track_cmd->add_option("--alpha", track_alpha_value, "Bone term weight");
  track_cmd->add_option("--gamma", track_gamma,
                        "Displacement weights (1 or N values)");
  track_cmd->add_option("--out", track_out, "Tracked sequence output path");
  track_cmd->add_option("--report", track_report, "Run report path");

  // eval
  auto* eval_cmd =
      app.add_subcommand("eval", "Evaluate a prediction against ground truth");
  std::string eval_pred;
  std::string eval_gt;
  std::string eval_csv;
  std::string eval_json;
  std::string eval_pcf;
  std::string eval_thresholds;
  bool eval_with_bones = false;
  std::string eval_problem;
  int eval_displ_duration = 1;
  eval_cmd->add_option("--pred", eval_pred, "Predicted sequence file")
      ->required();
  eval_cmd->add_option("--gt", eval_gt, "Ground-truth sequence file")
      ->required();
  eval_cmd->add_option("--csv", eval_csv, "Metric report CSV path");
  eval_cmd->add_option("--json", eval_json, "Metric report JSON path");
  eval_cmd->add_option("--pcf", eval_pcf, "PCF curve CSV path");
  eval_cmd->add_option("--thresholds", eval_thresholds,
                       "PCF thresholds in mm, ascending");
  eval_cmd->add_flag("--with-bones", eval_with_bones,
                     "Also report bone error between the two sequences");
  eval_cmd->add_option("--problem", eval_problem,
                       "Evaluate this problem's relation predictions");
  eval_cmd->add_option("--displ-duration", eval_displ_duration,
                       "Duration for the displacement error (with --problem)");

  // decode
  auto* decode_cmd = app.add_subcommand(
      "decode", "Decode relation maps into relation vectors");
  std::string decode_maps;
  std::string decode_anchors;
  std::string decode_family = "full";
  double decode_beta = 0.0;
  std::string decode_ensemble;
  std::string decode_out = "relations.json";
  decode_cmd->add_option("--maps", decode_maps, "Relation maps file")
      ->required();
  decode_cmd->add_option("--anchors", decode_anchors, "Anchor predictions file")
      ->required();
  decode_cmd->add_option("--family", decode_family,
                         "Weight family: binary, gaussian, linear, "
                         "exponential, joint-one, or full");
  decode_cmd->add_option("--beta", decode_beta, "Decay rate");
  decode_cmd->add_option("--ensemble", decode_ensemble,
                         "Ensemble members, e.g. binary:5,exponential:0.1");
  decode_cmd->add_option("--out", decode_out, "Decoded relations path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) {
      std::uint64_t noise_seed = synth_seed;
      if (!synth_noise_seed.empty()) {
        try {
          noise_seed = std::stoull(synth_noise_seed);
        } catch (const std::exception&) {
          usage_error("invalid --noise-seed value '" + synth_noise_seed + "'");
        }
      }
      return run_synth(synth_options, synth_seed, noise_seed,
                       parse_durations(synth_preset, synth_custom_durations),
                       synth_alpha, synth_gamma, synth_out, synth_problem_out);
    }
    if (track_cmd->parsed()) {
      if (!track_seeds.empty()) {
        const auto [first, last] = parse_seed_range(track_seeds);
        const DurationSet durations = parse_durations(
            track_preset.empty() ? "mfb" : track_preset,
            track_custom_durations);
        return run_track_batch(track_options, first, last, durations,
                               track_alpha_value, track_gamma,
                               track_report.empty() ? "batch.csv"
                                                    : track_report);
      }
      if (track_problem.empty()) {
        usage_error("track needs --problem FILE or --seeds A..B");
      }
      std::optional<double> alpha;
      if (track_alpha_option->count() > 0) alpha = track_alpha_value;
      return run_track_single(track_problem, track_preset,
                              track_custom_durations, alpha, track_gamma,
                              track_out, track_report);
    }
    if (eval_cmd->parsed()) {
      return run_eval(eval_pred, eval_gt, eval_csv, eval_json, eval_pcf,
                      eval_thresholds, eval_with_bones, eval_problem,
                      eval_displ_duration);
    }
    if (decode_cmd->parsed()) {
      return run_decode(decode_maps, decode_anchors, decode_family,
                        decode_beta, decode_ensemble, decode_out);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const InvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
