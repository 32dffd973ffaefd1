// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line with its measured numbers and wall time. Returns the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "relfuse/io.hpp"
#include "relfuse/metrics.hpp"
#include "relfuse/relations.hpp"
#include "relfuse/rng.hpp"
#include "relfuse/skeleton.hpp"
#include "relfuse/synth.hpp"
#include "relfuse/tracker.hpp"
#include "test_support.hpp"

using namespace relfuse;
using namespace relfuse::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void report(int number, const char* title, double budget_seconds,
            const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = check();
  } catch (const std::exception& e) {
    outcome = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const bool in_budget = elapsed <= budget_seconds;
  const bool pass = outcome.pass && in_budget;
  if (!pass) ++g_failures;
  std::printf("%s  criterion %d: %s — %s (%.2fs of %.0fs budget)\n",
              pass ? "PASS" : "FAIL", number, title, outcome.detail.c_str(),
              elapsed, budget_seconds);
  std::fflush(stdout);
}

std::string format(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.3g", value);
  return buffer;
}

// --- criterion 1: solve_tracking equals dense_oracle_solve ------------------

Outcome oracle_equivalence() {
  const std::vector<DurationSet> presets = {
      DurationSet::forward(), DurationSet::forward_backward(),
      DurationSet::multi_forward(), DurationSet::multi_forward_backward()};
  const double weights[] = {0.1, 1.0, 10.0};
  Rng rng(20240001);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int joints = 2 + static_cast<int>(rng.raw() % 5);   // [2, 6]
    const int frames = 3 + static_cast<int>(rng.raw() % 28);  // [3, 30]
    const DurationSet& durations = presets[i % 4];
    const double alpha = weights[(i / 4) % 3];
    const double gamma = weights[(i / 12) % 3];
    const TrackingProblem problem =
        random_problem(rng, joints, frames, 3, durations, alpha, gamma);
    const TrackedResult sparse = solve_tracking(problem);
    const TrackedResult dense = dense_oracle_solve(problem);
    worst = std::max(worst,
                     max_coordinate_difference(sparse.solution, dense.solution));
  }
  return {worst <= 1e-9,
          "200 problems, max coordinate difference " + format(worst)};
}

// --- criterion 2: noiseless exactness ---------------------------------------

Outcome noiseless_exactness() {
  MotionSpec spec;
  spec.tree = JointTree::from_parent_indices(
      std::vector<int>{-1, 0, 1, 2, 1, 4, 1, 6});
  spec.bone_lengths_mm = sample_bone_lengths(spec.tree, {100, 300}, 91);
  spec.frames = 25;
  spec.seed = 91;
  const PoseSequence ground_truth = generate_sequence(spec);
  const DurationSet all = DurationSet::multi_forward_backward();
  PredictionSet predictions =
      corrupt_predictions(spec.tree, ground_truth, all, {0, 0, 0, 91});
  const TrackingProblem full =
      make_problem(spec.tree, std::move(predictions), all, {});

  double worst = 0.0;
  for (const char* preset : {"f", "fb", "mf", "mfb"}) {
    const TrackingProblem problem =
        with_durations(full, *DurationSet::preset(preset));
    const TrackedResult result = solve_tracking(problem);
    worst = std::max(worst,
                     max_coordinate_difference(result.solution, ground_truth));
  }
  return {worst <= 1e-8,
          "all presets, max coordinate error " + format(worst)};
}

// --- criterion 3: duration-set ordering under noise --------------------------

Outcome duration_ordering() {
  const int seeds = 120;
  const JointTree tree = JointTree::from_parent_indices(
      std::vector<int>{-1, 0, 1, 2, 1, 4, 1, 6});
  const DurationSet all = DurationSet::multi_forward_backward();
  const std::vector<DurationSet> presets = {
      DurationSet::forward(), DurationSet::forward_backward(),
      DurationSet::multi_forward(), DurationSet::multi_forward_backward()};

  // errors[0] = single-frame, then one column per preset.
  std::vector<std::array<double, 5>> errors(seeds);
  for (int seed = 0; seed < seeds; ++seed) {
    MotionSpec spec;
    spec.tree = tree;
    spec.bone_lengths_mm = sample_bone_lengths(tree, {100, 300}, seed);
    spec.frames = 40;
    spec.rate = FrameRate::k8;
    spec.seed = static_cast<std::uint64_t>(seed);
    const PoseSequence ground_truth = generate_sequence(spec);
    PredictionSet predictions = corrupt_predictions(
        tree, ground_truth, all, {20.0, 5.0, 5.0, static_cast<std::uint64_t>(seed)});
    errors[seed][0] =
        joint_error(predictions.single_frame, ground_truth).joint_error_mm;
    const TrackingProblem full =
        make_problem(tree, std::move(predictions), all, {});
    for (std::size_t p = 0; p < presets.size(); ++p) {
      const TrackedResult result =
          solve_tracking(with_durations(full, presets[p]));
      errors[seed][p + 1] =
          joint_error(result.solution, ground_truth).joint_error_mm;
    }
  }

  // Paired differences between adjacent columns must each clear 3 standard
  // errors.
  static const char* kNames[] = {"single", "f", "fb", "mf", "mfb"};
  bool pass = true;
  std::string detail;
  for (int gap = 0; gap < 4; ++gap) {
    double mean = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
      mean += errors[seed][gap] - errors[seed][gap + 1];
    }
    mean /= seeds;
    double variance = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
      const double difference = errors[seed][gap] - errors[seed][gap + 1];
      variance += (difference - mean) * (difference - mean);
    }
    variance /= (seeds - 1);
    const double standard_error = std::sqrt(variance / seeds);
    const double z = mean / standard_error;
    if (!(mean > 0.0 && z >= 3.0)) pass = false;
    detail += std::string(kNames[gap]) + ">" + kNames[gap + 1] + " gap " +
              format(mean) + "mm z=" + format(z) + (gap < 3 ? ", " : "");
  }
  return {pass, std::to_string(seeds) + " seeds: " + detail};
}

// --- criterion 4: weighting degeneracy endpoints -----------------------------

Outcome degeneracy_endpoints() {
  Rng rng(20240004);
  bool exact = true;
  for (int trial = 0; trial < 20; ++trial) {
    const int rows = 5 + static_cast<int>(rng.raw() % 8);
    const int cols = 5 + static_cast<int>(rng.raw() % 8);
    RelationMap map(rows, cols, 3);
    Eigen::VectorXd value(3);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        for (int i = 0; i < 3; ++i) value[i] = rng.uniform(-100, 100);
        map.set(r, c, value);
      }
    }
    // Anchor on an exact pixel center inside the grid.
    const Eigen::Vector2d anchor(
        static_cast<double>(rng.raw() % static_cast<std::uint64_t>(cols)),
        static_cast<double>(rng.raw() % static_cast<std::uint64_t>(rows)));
    const DistanceMap distances =
        build_distance_map(anchor, rows, cols, GridTransform{});

    const Eigen::VectorXd binary_zero = weighted_inference(
        map, build_weight_map(distances, {WeightFamily::kBinary, 0.0}));
    const Eigen::VectorXd joint_one = weighted_inference(
        map, build_weight_map(distances, {WeightFamily::kJointOne, 0.0}));
    if (binary_zero != joint_one) exact = false;

    const double diameter = std::hypot(rows - 1.0, cols - 1.0);
    const Eigen::VectorXd binary_wide = weighted_inference(
        map, build_weight_map(distances, {WeightFamily::kBinary, diameter}));
    const Eigen::VectorXd full = weighted_inference(
        map, build_weight_map(distances, {WeightFamily::kFull, 0.0}));
    if (binary_wide != full) exact = false;
  }
  return {exact, "20 random maps, both endpoint pairs bitwise equal"};
}

// --- criterion 5: gradient checks --------------------------------------------

Outcome gradient_checks() {
  // Objective gradient at the solver output, finite differences, step 1e-5.
  // Run on consistent problems where the optimum makes all residuals vanish;
  // coordinates reach the stated 1e3 magnitude.
  Rng rng(20240005);
  double worst_gradient = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const JointTree tree = random_tree(rng, 4);
    const PoseSequence ground_truth = random_pose(rng, 8, 4, 3, 1000.0);
    TrackingProblem problem = consistent_problem(
        tree, ground_truth, DurationSet::multi_forward_backward(), {});
    const TrackedResult result = solve_tracking(problem);
    const double step = 1e-5;
    for (int t = 0; t < 8; ++t) {
      for (int k = 0; k < 4; ++k) {
        for (int c = 0; c < 3; ++c) {
          PoseSequence plus = result.solution;
          PoseSequence minus = result.solution;
          plus.at(t, k, c) += step;
          minus.at(t, k, c) -= step;
          const double finite_difference =
              (objective_value(problem, plus) -
               objective_value(problem, minus)) /
              (2.0 * step);
          worst_gradient = std::max(worst_gradient, std::abs(finite_difference));
        }
      }
    }
  }

  // Loss subgradient away from kinks, step 1e-4 against W * sign(difference).
  double worst_subgradient_error = 0.0;
  const int rows = 4;
  const int cols = 4;
  RelationMap predicted(rows, cols, 3);
  RelationMap target(rows, cols, 3);
  WeightMap weights(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      weights.at(r, c) = rng.uniform(0.05, 1.0);
      for (int i = 0; i < 3; ++i) {
        target.component(r, c, i) = rng.uniform(-10, 10);
        const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        predicted.component(r, c, i) =
            target.component(r, c, i) + sign * rng.uniform(0.5, 3.0);
      }
    }
  }
  const double step = 1e-4;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      for (int i = 0; i < 3; ++i) {
        RelationMap plus = predicted;
        RelationMap minus = predicted;
        plus.component(r, c, i) += step;
        minus.component(r, c, i) -= step;
        const double finite_difference =
            (relation_loss(plus, target, weights) -
             relation_loss(minus, target, weights)) /
            (2.0 * step);
        const double difference =
            predicted.component(r, c, i) - target.component(r, c, i);
        const double expected = weights.at(r, c) * (difference > 0 ? 1.0 : -1.0);
        worst_subgradient_error = std::max(
            worst_subgradient_error, std::abs(finite_difference - expected));
      }
    }
  }

  const bool pass = worst_gradient <= 1e-7 && worst_subgradient_error <= 1e-6;
  return {pass, "objective grad inf-norm " + format(worst_gradient) +
                    ", loss subgradient error " +
                    format(worst_subgradient_error)};
}

// --- criterion 6: metric identities -------------------------------------------

Outcome metric_identities() {
  Rng rng(20240006);
  bool pass = true;
  std::string failures;

  // Offset fixture: exactly 5.0.
  const PoseSequence base = random_pose(rng, 6, 4, 3);
  PoseSequence offset = base;
  for (int t = 0; t < 6; ++t) {
    for (int k = 0; k < 4; ++k) {
      offset.at(t, k, 0) += 3.0;
      offset.at(t, k, 1) += 4.0;
    }
  }
  if (joint_error(offset, base).joint_error_mm != 5.0) {
    pass = false;
    failures += " offset!=5";
  }

  // displ_error is 0 under perfect displacements regardless of sigma_single.
  MotionSpec spec;
  spec.tree = JointTree::chain(5);
  spec.bone_lengths_mm = sample_bone_lengths(spec.tree, {100, 300}, 6);
  spec.frames = 30;
  spec.seed = 6;
  const PoseSequence ground_truth = generate_sequence(spec);
  const PredictionSet predictions = corrupt_predictions(
      spec.tree, ground_truth, DurationSet::forward(), {20.0, 0.0, 0.0, 6});
  if (displ_error(predictions.displacements.at(1), ground_truth, 1) != 0.0) {
    pass = false;
    failures += " displ!=0";
  }

  // PCF monotone with {0, 1} at the extreme thresholds.
  const PoseSequence predicted = random_pose(rng, 12, 4, 3);
  const PoseSequence reference = random_pose(rng, 12, 4, 3);
  std::vector<double> thresholds = {0.0};
  for (double tau = 0.5; tau <= 8192.0; tau *= 2.0) thresholds.push_back(tau);
  thresholds.push_back(std::numeric_limits<double>::infinity());
  const auto curve = pcf(predicted, reference, thresholds);
  if (curve.front().second != 0.0 || curve.back().second != 1.0) {
    pass = false;
    failures += " pcf-extremes";
  }
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].second < curve[i - 1].second) {
      pass = false;
      failures += " pcf-monotone";
      break;
    }
  }

  // Bin boundaries.
  const DisplacementBins bins =
      displacement_bins(std::vector<double>{25.0, 45.0, 70.0});
  if (bins.easy_count != 1 || bins.middle_count != 1 || bins.hard_count != 1 ||
      bins.easy_fraction + bins.middle_fraction + bins.hard_fraction != 1.0) {
    pass = false;
    failures += " bins";
  }

  return {pass, pass ? "offset 5.0, perfect-displ 0, pcf extremes, bins"
                     : "failed:" + failures};
}

// --- criterion 7: frame-rate displacement ordering ----------------------------

Outcome frame_rate_ordering() {
  const int seeds = 100;
  double means[3] = {0.0, 0.0, 0.0};
  const FrameRate rates[3] = {FrameRate::k2_5, FrameRate::k8, FrameRate::k25};
  for (int seed = 0; seed < seeds; ++seed) {
    for (int r = 0; r < 3; ++r) {
      MotionSpec spec;
      spec.tree = JointTree::chain(5);
      spec.bone_lengths_mm = sample_bone_lengths(spec.tree, {100, 300}, seed);
      spec.frames = 30;
      spec.rate = rates[r];
      spec.seed = static_cast<std::uint64_t>(seed);
      const PoseSequence pose = generate_sequence(spec);
      const RelationTable steps = compute_displacements(pose, 1);
      double total = 0.0;
      int count = 0;
      for (int t = 1; t < spec.frames; ++t) {
        for (int k = 0; k < 5; ++k) {
          total += steps.vec(k, t).norm();
          ++count;
        }
      }
      means[r] += total / count;
    }
  }
  for (double& m : means) m /= seeds;
  const bool pass = means[0] > means[1] && means[1] > means[2];
  return {pass, "mean step 2.5FPS " + format(means[0]) + "mm > 8FPS " +
                    format(means[1]) + "mm > 25FPS " + format(means[2]) + "mm"};
}

// --- criterion 8: determinism and file round trips ----------------------------

Outcome determinism_round_trip() {
  // Byte-identical synth output per seed, ground truth and problem together.
  MotionSpec spec;
  spec.tree = JointTree::from_parent_indices(std::vector<int>{-1, 0, 0, 2, 3});
  spec.bone_lengths_mm = sample_bone_lengths(spec.tree, {100, 300}, 8);
  spec.frames = 20;
  spec.seed = 8;
  const DurationSet durations = DurationSet::multi_forward_backward();
  const auto render = [&] {
    const PoseSequence ground_truth = generate_sequence(spec);
    PredictionSet predictions = corrupt_predictions(
        spec.tree, ground_truth, durations, {20.0, 5.0, 5.0, 8});
    const TrackingProblem problem =
        make_problem(spec.tree, std::move(predictions), durations, {});
    return io::sequence_to_json({spec.tree, ground_truth}) +
           io::problem_to_json(problem);
  };
  const bool deterministic = render() == render();

  // Lossless round trip of 1000+ random values spanning wide magnitudes.
  Rng rng(20240008);
  const JointTree tree = JointTree::chain(10);
  PoseSequence pose(34, 10, 3);  // 1020 values
  for (int t = 0; t < 34; ++t) {
    for (int k = 0; k < 10; ++k) {
      for (int c = 0; c < 3; ++c) {
        pose.at(t, k, c) =
            rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(-15.0, 15.0));
      }
    }
  }
  const io::SequenceDoc loaded =
      io::sequence_from_json(io::sequence_to_json({tree, pose}));
  const bool lossless = loaded.pose == pose && loaded.tree == tree;

  return {deterministic && lossless,
          std::string(deterministic ? "byte-identical renders" : "renders differ") +
              ", " + (lossless ? "1020 values round-trip exactly"
                               : "round trip lost precision")};
}

}  // namespace

int main() {
  std::printf("relfuse acceptance suite\n");
  report(1, "oracle equivalence", 60.0, oracle_equivalence);
  report(2, "noiseless exactness", 5.0, noiseless_exactness);
  report(3, "duration-set ordering under noise", 300.0, duration_ordering);
  report(4, "weighting degeneracy endpoints", 5.0, degeneracy_endpoints);
  report(5, "gradient checks", 10.0, gradient_checks);
  report(6, "metric identities", 5.0, metric_identities);
  report(7, "frame-rate displacement ordering", 60.0, frame_rate_ordering);
  report(8, "determinism and round trips", 5.0, determinism_round_trip);
  if (g_failures == 0) {
    std::printf("all 8 criteria passed\n");
  } else {
    std::printf("%d criteria FAILED\n", g_failures);
  }
  return g_failures;
}
