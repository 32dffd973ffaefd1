#pragma once

// Shared generators for randomized tests: trees, poses, and tracking
// problems with either consistent (noiseless) or arbitrary relation
// predictions.

#include <cstdint>
#include <vector>

#include "relfuse/relations.hpp"
#include "relfuse/rng.hpp"
#include "relfuse/skeleton.hpp"
#include "relfuse/tracker.hpp"

namespace relfuse::testing {

inline JointTree random_tree(Rng& rng, int joint_count) {
  std::vector<std::optional<int>> parents(joint_count);
  for (int k = 1; k < joint_count; ++k) {
    parents[k] = static_cast<int>(rng.raw() % static_cast<std::uint64_t>(k));
  }
  return JointTree(std::move(parents));
}

inline PoseSequence random_pose(Rng& rng, int frames, int joints, int dims,
                                double magnitude = 500.0) {
  PoseSequence pose(frames, joints, dims);
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < joints; ++k) {
      for (int c = 0; c < dims; ++c) {
        pose.at(t, k, c) = rng.uniform(-magnitude, magnitude);
      }
    }
  }
  return pose;
}

// Problem whose bones and displacements are computed exactly from a ground
// truth; the unique minimizer is that ground truth when single_frame == gt.
inline TrackingProblem consistent_problem(const JointTree& tree,
                                          const PoseSequence& ground_truth,
                                          const DurationSet& durations,
                                          TrackerConfig config) {
  if (config.gamma.empty()) config.gamma.assign(durations.values().size(), 1.0);
  TrackingProblem problem;
  problem.tree = tree;
  problem.single_frame = ground_truth;
  problem.bones = compute_bone_vectors(tree, ground_truth);
  for (int d : durations.values()) {
    problem.displacements.emplace(d, compute_displacements(ground_truth, d));
  }
  problem.durations = durations;
  problem.config = std::move(config);
  return problem;
}

// Problem with arbitrary (inconsistent) relation predictions.
inline TrackingProblem random_problem(Rng& rng, int joints, int frames,
                                      int dims, const DurationSet& durations,
                                      double alpha, double gamma) {
  TrackingProblem problem;
  problem.tree = random_tree(rng, joints);
  problem.single_frame = random_pose(rng, frames, joints, dims);
  problem.bones = RelationTable(joints, frames, dims);
  Eigen::VectorXd value(dims);
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < joints; ++k) {
      if (problem.tree.is_root(k)) continue;
      for (int c = 0; c < dims; ++c) value[c] = rng.uniform(-200, 200);
      problem.bones.set(k, t, value);
    }
  }
  for (int d : durations.values()) {
    RelationTable table(joints, frames, dims);
    for (int t = 0; t < frames; ++t) {
      if (t - d < 0 || t - d >= frames) continue;
      for (int k = 0; k < joints; ++k) {
        for (int c = 0; c < dims; ++c) value[c] = rng.uniform(-100, 100);
        table.set(k, t, value);
      }
    }
    problem.displacements.emplace(d, std::move(table));
  }
  problem.durations = durations;
  problem.config.alpha = alpha;
  problem.config.gamma.assign(durations.values().size(), gamma);
  return problem;
}

inline double max_coordinate_difference(const PoseSequence& a,
                                        const PoseSequence& b) {
  double worst = 0.0;
  for (int t = 0; t < a.frames(); ++t) {
    for (int k = 0; k < a.joint_count(); ++k) {
      for (int c = 0; c < a.dims(); ++c) {
        worst = std::max(worst, std::abs(a.at(t, k, c) - b.at(t, k, c)));
      }
    }
  }
  return worst;
}

}  // namespace relfuse::testing
