#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "relfuse/skeleton.hpp"

namespace relfuse {

// Per-(joint, frame) relation vectors with a presence mask. Absent entries
// model relations that do not exist: the root has no bone, and displacements
// whose source frame falls outside the sequence are dropped.
class RelationTable {
 public:
  RelationTable() = default;
  RelationTable(int joint_count, int frames, int dims);

  int joint_count() const { return joints_; }
  int frames() const { return frames_; }
  int dims() const { return dims_; }

  bool present(int k, int t) const { return present_[index(k, t)] != 0; }
  Eigen::Map<const Eigen::VectorXd> vec(int k, int t) const;
  void set(int k, int t, const Eigen::Ref<const Eigen::VectorXd>& value);

  int present_count() const;
  bool same_shape(const RelationTable& other) const;
  bool same_support(const RelationTable& other) const;
  bool all_finite() const;

  bool operator==(const RelationTable&) const = default;

 private:
  std::size_t index(int k, int t) const {
    return static_cast<std::size_t>(t) * joints_ + k;
  }

  int joints_ = 0;
  int frames_ = 0;
  int dims_ = 0;
  std::vector<double> data_;
  std::vector<std::uint8_t> present_;
};

// Bone vector of every non-root joint: value at (k, t) points from the
// parent to joint k in frame t.
RelationTable compute_bone_vectors(const JointTree& tree,
                                   const PoseSequence& pose);

// Joint displacement over a signed duration: value at (k, t) points from the
// joint's position at frame t - duration to its position at frame t. Entries
// whose source frame is outside the sequence are absent.
RelationTable compute_displacements(const PoseSequence& pose, int duration);

// Conventional relation-map resolution; file formats may carry any shape.
inline constexpr int kDefaultGridSize = 64;

// Affine pixel <-> image-plane mapping, world = origin + scale * pixel.
// Pixel coordinates are (x, y) = (column, row).
struct GridTransform {
  Eigen::Vector2d origin{0.0, 0.0};
  Eigen::Vector2d scale{1.0, 1.0};

  Eigen::Vector2d to_world(const Eigen::Vector2d& pixel) const {
    return origin + scale.cwiseProduct(pixel);
  }
  Eigen::Vector2d to_grid(const Eigen::Vector2d& world) const {
    return (world - origin).cwiseQuotient(scale);
  }
};

// Grid of per-pixel relation-vector predictions for one joint.
class RelationMap {
 public:
  RelationMap() = default;
  RelationMap(int rows, int cols, int dims,
              const GridTransform& transform = {});
  static RelationMap constant(int rows, int cols,
                              const Eigen::Ref<const Eigen::VectorXd>& value,
                              const GridTransform& transform = {});

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int dims() const { return dims_; }
  const GridTransform& transform() const { return transform_; }

  Eigen::Map<const Eigen::VectorXd> at(int row, int col) const {
    return {data_.data() + index(row, col) * dims_, dims_};
  }
  void set(int row, int col, const Eigen::Ref<const Eigen::VectorXd>& value);

  double component(int row, int col, int c) const {
    return data_[index(row, col) * dims_ + c];
  }
  double& component(int row, int col, int c) {
    return data_[index(row, col) * dims_ + c];
  }

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * cols_ + col;
  }

  int rows_ = 0;
  int cols_ = 0;
  int dims_ = 0;
  GridTransform transform_;
  std::vector<double> data_;
};

// Distance from each pixel to the anchor (the related joint's location
// projected into grid coordinates), in pixel units.
class DistanceMap {
 public:
  DistanceMap() = default;
  DistanceMap(int rows, int cols, const Eigen::Vector2d& anchor_grid);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Eigen::Vector2d& anchor() const { return anchor_; }

  double at(int row, int col) const { return values_[row * static_cast<std::size_t>(cols_) + col]; }
  double& at(int row, int col) { return values_[row * static_cast<std::size_t>(cols_) + col]; }
  double min_value() const;
  double max_value() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  Eigen::Vector2d anchor_{0.0, 0.0};
  std::vector<double> values_;
};

class WeightMap {
 public:
  WeightMap() = default;
  WeightMap(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double at(int row, int col) const { return values_[row * static_cast<std::size_t>(cols_) + col]; }
  double& at(int row, int col) { return values_[row * static_cast<std::size_t>(cols_) + col]; }
  double total() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> values_;
};

// Decay families mapping distance to a weight in [0, 1]:
//   binary       1 if F <= beta, else 0
//   gaussian     exp(-beta * F^2)
//   linear       clamp(1 - beta * F, 0, 1)
//   exponential  exp(-beta * F)
//   joint-one    1 only at the pixel(s) attaining the minimum distance
//   full         1 everywhere
enum class WeightFamily {
  kBinary,
  kGaussian,
  kLinear,
  kExponential,
  kJointOne,
  kFull,
};

const char* weight_family_name(WeightFamily family);
std::optional<WeightFamily> parse_weight_family(std::string_view name);

struct WeightSpec {
  WeightFamily family = WeightFamily::kFull;
  double beta = 0.0;  // decay rate; ignored by joint-one and full
};

DistanceMap build_distance_map(const Eigen::Vector2d& anchor_world, int rows,
                               int cols, const GridTransform& transform);

WeightMap build_weight_map(const DistanceMap& distances,
                           const WeightSpec& spec);

// Weighted mean of all per-pixel predictions: sum(W * M) / sum(W).
Eigen::VectorXd weighted_inference(const RelationMap& map,
                                   const WeightMap& weights);

// Weighted L1 objective: sum over pixels of W * |predicted - target|_1.
double relation_loss(const RelationMap& predicted, const RelationMap& target,
                     const WeightMap& weights);

// Unweighted mean of weighted_inference outputs across several weight specs.
Eigen::VectorXd ensemble_inference(const RelationMap& map,
                                   const DistanceMap& distances,
                                   std::span<const WeightSpec> specs);

}  // namespace relfuse
