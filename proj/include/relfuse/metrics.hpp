#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "relfuse/relations.hpp"
#include "relfuse/skeleton.hpp"

namespace relfuse {

struct MetricReport {
  double joint_error_mm = 0.0;
  std::vector<double> per_joint;      // mean position error per joint
  std::vector<double> per_dimension;  // mean absolute error per coordinate
  std::optional<double> bone_error_mm;
  std::optional<double> displ_error_mm;
  std::vector<std::pair<double, double>> pcf_curve;  // (threshold_mm, fraction)
};

// Mean per-joint position error in millimeters, with per-joint and
// per-dimension breakdowns.
MetricReport joint_error(const PoseSequence& predicted,
                         const PoseSequence& ground_truth);

// Mean bone-vector error over non-root joints and frames. Tables must share
// one support; an empty support yields 0.
double bone_error(const RelationTable& predicted,
                  const RelationTable& ground_truth);

// Adds each predicted displacement to the ground-truth pose at the source
// frame and measures the position error at the target frame. Exactly zero
// for perfect displacement predictions regardless of single-frame quality.
double displ_error(const RelationTable& predicted_displacements,
                   const PoseSequence& ground_truth, int duration);

// Percentage of correct frames: for each threshold, the fraction of frames
// whose maximum per-joint error is strictly below it. Thresholds must be
// sorted ascending.
std::vector<std::pair<double, double>> pcf(const PoseSequence& predicted,
                                           const PoseSequence& ground_truth,
                                           std::span<const double> thresholds);

inline constexpr double kEasyMaxMm = 30.0;  // easy: magnitude < 30
inline constexpr double kHardMinMm = 60.0;  // hard: magnitude > 60

struct DisplacementBins {
  long easy_count = 0;    // < 30 mm
  long middle_count = 0;  // [30, 60] mm
  long hard_count = 0;    // > 60 mm
  double easy_fraction = 0.0;
  double middle_fraction = 0.0;
  double hard_fraction = 0.0;
  double easy_mean_mm = 0.0;  // 0 when the bin is empty
  double middle_mean_mm = 0.0;
  double hard_mean_mm = 0.0;
  long total() const { return easy_count + middle_count + hard_count; }
};

DisplacementBins displacement_bins(std::span<const double> magnitudes_mm);

}  // namespace relfuse
