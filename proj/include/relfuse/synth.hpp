#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "relfuse/rng.hpp"
#include "relfuse/skeleton.hpp"
#include "relfuse/tracker.hpp"

namespace relfuse {

// Frame-rate tag controlling the sampling step of the synthetic motion; a
// lower rate means larger per-step joint displacements.
enum class FrameRate { k25, k8, k2_5 };

double frame_rate_hz(FrameRate rate);
std::optional<FrameRate> parse_frame_rate(double fps);
constexpr const char* kFrameRateChoices = "{25, 8, 2.5}";

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Synthetic articulated motion: the root translates along seeded sinusoids
// and every bone direction swings through seeded sinusoidal angles, so bone
// lengths are constant by construction.
struct MotionSpec {
  JointTree tree;
  std::vector<double> bone_lengths_mm;  // size K; the root entry is unused
  int frames = 2;
  int dims = 3;
  FrameRate rate = FrameRate::k8;
  Range root_amplitude_mm{20.0, 80.0};
  Range angle_amplitude_rad{0.05, 0.3};
  Range frequency_hz{0.1, 0.5};
  std::uint64_t seed = 0;
};

PoseSequence generate_sequence(const MotionSpec& spec);

// Samples one bone length per joint from the given range (root slot 0).
std::vector<double> sample_bone_lengths(const JointTree& tree, Range range_mm,
                                        std::uint64_t seed);

// Additive Gaussian error applied to the simulated predictor outputs.
struct NoiseSpec {
  double sigma_single_mm = 0.0;
  double sigma_bone_mm = 0.0;
  double sigma_displ_mm = 0.0;
  std::uint64_t seed = 0;
};

struct PredictionSet {
  PoseSequence single_frame;
  RelationTable bones;
  std::map<int, RelationTable> displacements;
};

// Derives noisy single-frame, bone, and per-duration displacement predictions
// from a ground-truth sequence. Deterministic per noise seed; every duration
// draws independent noise.
PredictionSet corrupt_predictions(const JointTree& tree,
                                  const PoseSequence& ground_truth,
                                  const DurationSet& durations,
                                  const NoiseSpec& noise);

TrackingProblem make_problem(const JointTree& tree, PredictionSet predictions,
                             DurationSet durations, TrackerConfig config);

}  // namespace relfuse
