#include "relfuse/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace relfuse {

MetricReport joint_error(const PoseSequence& predicted,
                         const PoseSequence& ground_truth) {
  if (!predicted.same_shape(ground_truth)) {
    throw InvariantError(ErrorCode::kShapeMismatch,
                         "pose sequences have different shapes");
  }
  const int frames = predicted.frames();
  const int joints = predicted.joint_count();
  const int dims = predicted.dims();

  MetricReport report;
  report.per_joint.assign(joints, 0.0);
  report.per_dimension.assign(dims, 0.0);
  double total = 0.0;
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < joints; ++k) {
      const Eigen::VectorXd difference =
          predicted.joint(t, k) - ground_truth.joint(t, k);
      const double distance = difference.norm();
      total += distance;
      report.per_joint[k] += distance;
      for (int c = 0; c < dims; ++c) {
        report.per_dimension[c] += std::abs(difference[c]);
      }
    }
  }
  const double samples = static_cast<double>(frames) * joints;
  report.joint_error_mm = total / samples;
  for (double& v : report.per_joint) v /= frames;
  for (double& v : report.per_dimension) v /= samples;
  return report;
}

double bone_error(const RelationTable& predicted,
                  const RelationTable& ground_truth) {
  if (!predicted.same_support(ground_truth)) {
    throw InvariantError(ErrorCode::kSupportMismatch,
                         "bone tables do not share a support");
  }
  double total = 0.0;
  long count = 0;
  for (int t = 0; t < predicted.frames(); ++t) {
    for (int k = 0; k < predicted.joint_count(); ++k) {
      if (!predicted.present(k, t)) continue;
      total += (predicted.vec(k, t) - ground_truth.vec(k, t)).norm();
      ++count;
    }
  }
  return count > 0 ? total / static_cast<double>(count) : 0.0;
}

double displ_error(const RelationTable& predicted_displacements,
                   const PoseSequence& ground_truth, int duration) {
  if (duration == 0) {
    throw InvariantError(ErrorCode::kZeroDuration,
                         "displacement duration must be nonzero");
  }
  if (predicted_displacements.joint_count() != ground_truth.joint_count() ||
      predicted_displacements.frames() != ground_truth.frames() ||
      predicted_displacements.dims() != ground_truth.dims()) {
    throw InvariantError(ErrorCode::kShapeMismatch,
                         "displacement table does not match the pose shape");
  }
  double total = 0.0;
  long count = 0;
  for (int t = 0; t < ground_truth.frames(); ++t) {
    for (int k = 0; k < ground_truth.joint_count(); ++k) {
      if (!predicted_displacements.present(k, t)) continue;
      const int source = t - duration;
      if (source < 0 || source >= ground_truth.frames()) {
        throw InvariantError(ErrorCode::kSupportMismatch,
                             "displacement entry at frame " +
                                 std::to_string(t) +
                                 " has no in-range source frame");
      }
      // |(J^{t-d} + pred) - J^t| evaluated as |pred - (J^t - J^{t-d})| so a
      // prediction equal to the true displacement scores exactly zero.
      total += (predicted_displacements.vec(k, t) -
                (ground_truth.joint(t, k) - ground_truth.joint(source, k)))
                   .norm();
      ++count;
    }
  }
  if (count == 0) {
    throw InvariantError(ErrorCode::kSupportMismatch,
                         "displacement table has no entries to evaluate");
  }
  return total / static_cast<double>(count);
}

std::vector<std::pair<double, double>> pcf(
    const PoseSequence& predicted, const PoseSequence& ground_truth,
    std::span<const double> thresholds) {
  if (!predicted.same_shape(ground_truth)) {
    throw InvariantError(ErrorCode::kShapeMismatch,
                         "pose sequences have different shapes");
  }
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "thresholds must be sorted ascending");
  }
  const int frames = predicted.frames();
  std::vector<double> frame_max(frames, 0.0);
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < predicted.joint_count(); ++k) {
      frame_max[t] = std::max(
          frame_max[t],
          (predicted.joint(t, k) - ground_truth.joint(t, k)).norm());
    }
  }

  std::vector<std::pair<double, double>> curve;
  curve.reserve(thresholds.size());
  for (double threshold : thresholds) {
    long correct = 0;
    for (double error : frame_max) {
      if (error < threshold) ++correct;
    }
    curve.emplace_back(threshold,
                       static_cast<double>(correct) / frames);
  }
  return curve;
}

DisplacementBins displacement_bins(std::span<const double> magnitudes_mm) {
  DisplacementBins bins;
  double easy_sum = 0.0;
  double middle_sum = 0.0;
  double hard_sum = 0.0;
  for (double magnitude : magnitudes_mm) {
    if (!(magnitude >= 0.0)) {
      throw InvariantError(ErrorCode::kInvalidInput,
                           "displacement magnitudes must be nonnegative");
    }
    if (magnitude < kEasyMaxMm) {
      ++bins.easy_count;
      easy_sum += magnitude;
    } else if (magnitude <= kHardMinMm) {
      ++bins.middle_count;
      middle_sum += magnitude;
    } else {
      ++bins.hard_count;
      hard_sum += magnitude;
    }
  }
  const long total = bins.total();
  if (total > 0) {
    bins.easy_fraction = static_cast<double>(bins.easy_count) / total;
    bins.middle_fraction = static_cast<double>(bins.middle_count) / total;
    bins.hard_fraction = static_cast<double>(bins.hard_count) / total;
  }
  if (bins.easy_count > 0) bins.easy_mean_mm = easy_sum / bins.easy_count;
  if (bins.middle_count > 0) bins.middle_mean_mm = middle_sum / bins.middle_count;
  if (bins.hard_count > 0) bins.hard_mean_mm = hard_sum / bins.hard_count;
  return bins;
}

}  // namespace relfuse
