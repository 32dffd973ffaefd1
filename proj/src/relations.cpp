#include "relfuse/relations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relfuse {

RelationTable::RelationTable(int joint_count, int frames, int dims)
    : joints_(joint_count), frames_(frames), dims_(dims) {
  if (joint_count < 1 || frames < 1 || dims < 1) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "relation table needs positive shape");
  }
  const auto cells = static_cast<std::size_t>(joint_count) * frames;
  data_.assign(cells * dims, 0.0);
  present_.assign(cells, 0);
}

Eigen::Map<const Eigen::VectorXd> RelationTable::vec(int k, int t) const {
  if (!present(k, t)) {
    throw InvariantError(ErrorCode::kSupportMismatch,
                         "no relation entry at joint " + std::to_string(k) +
                             ", frame " + std::to_string(t));
  }
  return {data_.data() + index(k, t) * dims_, dims_};
}

void RelationTable::set(int k, int t,
                        const Eigen::Ref<const Eigen::VectorXd>& value) {
  if (value.size() != dims_) {
    throw InvariantError(ErrorCode::kShapeMismatch,
                         "relation vector has wrong dimension");
  }
  const std::size_t base = index(k, t) * dims_;
  for (int c = 0; c < dims_; ++c) data_[base + c] = value[c];
  present_[index(k, t)] = 1;
}

int RelationTable::present_count() const {
  int count = 0;
  for (auto flag : present_) count += flag;
  return count;
}

bool RelationTable::same_shape(const RelationTable& other) const {
  return joints_ == other.joints_ && frames_ == other.frames_ &&
         dims_ == other.dims_;
}

bool RelationTable::same_support(const RelationTable& other) const {
  return same_shape(other) && present_ == other.present_;
}

bool RelationTable::all_finite() const {
  for (std::size_t cell = 0; cell < present_.size(); ++cell) {
    if (!present_[cell]) continue;
    for (int c = 0; c < dims_; ++c) {
      if (!std::isfinite(data_[cell * dims_ + c])) return false;
    }
  }
  return true;
}

RelationTable compute_bone_vectors(const JointTree& tree,
                                   const PoseSequence& pose) {
  if (tree.joint_count() != pose.joint_count()) {
    throw InvariantError(ErrorCode::kShapeMismatch,
                         "pose joint count does not match the tree");
  }
  RelationTable bones(pose.joint_count(), pose.frames(), pose.dims());
  for (int t = 0; t < pose.frames(); ++t) {
    for (int k = 0; k < pose.joint_count(); ++k) {
      const auto parent = tree.parent(k);
      if (!parent.has_value()) continue;
      bones.set(k, t, pose.joint(t, k) - pose.joint(t, *parent));
    }
  }
  return bones;
}

RelationTable compute_displacements(const PoseSequence& pose, int duration) {
  if (duration == 0) {
    throw InvariantError(ErrorCode::kZeroDuration,
                         "displacement duration must be nonzero");
  }
  RelationTable displacements(pose.joint_count(), pose.frames(), pose.dims());
  for (int t = 0; t < pose.frames(); ++t) {
    const int source = t - duration;
    if (source < 0 || source >= pose.frames()) continue;
    for (int k = 0; k < pose.joint_count(); ++k) {
      displacements.set(k, t, pose.joint(t, k) - pose.joint(source, k));
    }
  }
  return displacements;
}

RelationMap::RelationMap(int rows, int cols, int dims,
                         const GridTransform& transform)
    : rows_(rows), cols_(cols), dims_(dims), transform_(transform) {
  if (rows < 1 || cols < 1 || dims < 1) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "relation map needs positive shape");
  }
  data_.assign(static_cast<std::size_t>(rows) * cols * dims, 0.0);
}

RelationMap RelationMap::constant(int rows, int cols,
                                  const Eigen::Ref<const Eigen::VectorXd>& value,
                                  const GridTransform& transform) {
  RelationMap map(rows, cols, static_cast<int>(value.size()), transform);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) map.set(r, c, value);
  }
  return map;
}

void RelationMap::set(int row, int col,
                      const Eigen::Ref<const Eigen::VectorXd>& value) {
  if (value.size() != dims_) {
    throw InvariantError(ErrorCode::kShapeMismatch,
                         "relation map value has wrong dimension");
  }
  const std::size_t base = index(row, col) * dims_;
  for (int c = 0; c < dims_; ++c) data_[base + c] = value[c];
}

DistanceMap::DistanceMap(int rows, int cols, const Eigen::Vector2d& anchor_grid)
    : rows_(rows), cols_(cols), anchor_(anchor_grid) {
  if (rows < 1 || cols < 1) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "distance map needs positive shape");
  }
  values_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

double DistanceMap::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double DistanceMap::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

WeightMap::WeightMap(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "weight map needs positive shape");
  }
  values_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

double WeightMap::total() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum;
}

const char* weight_family_name(WeightFamily family) {
  switch (family) {
    case WeightFamily::kBinary: return "binary";
    case WeightFamily::kGaussian: return "gaussian";
    case WeightFamily::kLinear: return "linear";
    case WeightFamily::kExponential: return "exponential";
    case WeightFamily::kJointOne: return "joint-one";
    case WeightFamily::kFull: return "full";
  }
  return "unknown";
}

std::optional<WeightFamily> parse_weight_family(std::string_view name) {
  if (name == "binary") return WeightFamily::kBinary;
  if (name == "gaussian") return WeightFamily::kGaussian;
  if (name == "linear") return WeightFamily::kLinear;
  if (name == "exponential") return WeightFamily::kExponential;
  if (name == "joint-one" || name == "jointone") return WeightFamily::kJointOne;
  if (name == "full") return WeightFamily::kFull;
  return std::nullopt;
}

DistanceMap build_distance_map(const Eigen::Vector2d& anchor_world, int rows,
                               int cols, const GridTransform& transform) {
  if (!anchor_world.allFinite()) {
    throw InvariantError(ErrorCode::kAnchorNotFinite,
                         "anchor point must be finite");
  }
  if (transform.scale[0] == 0.0 || transform.scale[1] == 0.0) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "grid transform scale must be nonzero");
  }
  const Eigen::Vector2d anchor_grid = transform.to_grid(anchor_world);
  DistanceMap distances(rows, cols, anchor_grid);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      distances.at(r, c) =
          std::hypot(c - anchor_grid[0], r - anchor_grid[1]);
    }
  }
  return distances;
}

WeightMap build_weight_map(const DistanceMap& distances,
                           const WeightSpec& spec) {
  if (!std::isfinite(spec.beta) || spec.beta < 0.0) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "beta must be finite and nonnegative");
  }
  WeightMap weights(distances.rows(), distances.cols());
  const double minimum = distances.min_value();
  for (int r = 0; r < distances.rows(); ++r) {
    for (int c = 0; c < distances.cols(); ++c) {
      const double f = distances.at(r, c);
      double w = 0.0;
      switch (spec.family) {
        case WeightFamily::kBinary:
          w = f <= spec.beta ? 1.0 : 0.0;
          break;
        case WeightFamily::kGaussian:
          w = std::exp(-spec.beta * f * f);
          break;
        case WeightFamily::kLinear:
          w = std::clamp(1.0 - spec.beta * f, 0.0, 1.0);
          break;
        case WeightFamily::kExponential:
          w = std::exp(-spec.beta * f);
          break;
        case WeightFamily::kJointOne:
          w = f <= minimum ? 1.0 : 0.0;
          break;
        case WeightFamily::kFull:
          w = 1.0;
          break;
      }
      weights.at(r, c) = w;
    }
  }
  return weights;
}

Eigen::VectorXd weighted_inference(const RelationMap& map,
                                   const WeightMap& weights) {
  if (map.rows() != weights.rows() || map.cols() != weights.cols()) {
    throw InvariantError(ErrorCode::kShapeMismatch,
                         "relation map and weight map shapes differ");
  }
  Eigen::VectorXd accumulated = Eigen::VectorXd::Zero(map.dims());
  double total = 0.0;
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      const double w = weights.at(r, c);
      if (w == 0.0) continue;
      accumulated += w * map.at(r, c);
      total += w;
    }
  }
  if (total <= 0.0) {
    throw InvariantError(ErrorCode::kZeroTotalWeight,
                         "weight map sums to zero");
  }
  return accumulated / total;
}

double relation_loss(const RelationMap& predicted, const RelationMap& target,
                     const WeightMap& weights) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols() ||
      predicted.dims() != target.dims() ||
      predicted.rows() != weights.rows() ||
      predicted.cols() != weights.cols()) {
    throw InvariantError(ErrorCode::kShapeMismatch,
                         "loss inputs must share one grid shape");
  }
  double loss = 0.0;
  for (int r = 0; r < predicted.rows(); ++r) {
    for (int c = 0; c < predicted.cols(); ++c) {
      loss += weights.at(r, c) *
              (predicted.at(r, c) - target.at(r, c)).lpNorm<1>();
    }
  }
  return loss;
}

Eigen::VectorXd ensemble_inference(const RelationMap& map,
                                   const DistanceMap& distances,
                                   std::span<const WeightSpec> specs) {
  if (specs.empty()) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "ensemble needs at least one weight spec");
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(map.dims());
  for (const WeightSpec& spec : specs) {
    mean += weighted_inference(map, build_weight_map(distances, spec));
  }
  return mean / static_cast<double>(specs.size());
}

}  // namespace relfuse
