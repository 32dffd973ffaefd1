#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "relfuse/errors.hpp"

namespace relfuse {

// Kinematic joint tree. Joint indices are 0-based; the bone of joint k
// points from parent(k) to k. Exactly one joint (the root) has no parent.
class JointTree {
 public:
  JointTree() = default;
  explicit JointTree(std::vector<std::optional<int>> parents);

  // Parses the -1-for-root encoding used by the file formats.
  static JointTree from_parent_indices(std::span<const int> parents);
  static JointTree chain(int joint_count);  // 0 <- 1 <- 2 <- ...
  static JointTree star(int joint_count);   // every joint a child of 0

  int joint_count() const { return static_cast<int>(parents_.size()); }
  std::optional<int> parent(int k) const { return parents_.at(k); }
  bool is_root(int k) const { return !parents_.at(k).has_value(); }
  int root() const;  // first parentless joint; unique on valid trees
  std::vector<int> parent_indices() const;  // -1 sentinel form

  bool operator==(const JointTree&) const = default;

 private:
  std::vector<std::optional<int>> parents_;
};

struct TreeCheck {
  bool ok = true;
  ErrorCode code = ErrorCode::kInvalidInput;  // meaningful only when !ok
  std::string detail;
};

// Accepts exactly the trees for which a topological order rooted at the
// single parentless joint exists.
TreeCheck validate_tree(const JointTree& tree);

// Joint positions over a sequence: frames x joints x dims, millimeters.
class PoseSequence {
 public:
  PoseSequence() = default;
  PoseSequence(int frames, int joint_count, int dims);

  int frames() const { return frames_; }
  int joint_count() const { return joints_; }
  int dims() const { return dims_; }

  double at(int t, int k, int c) const { return data_[offset(t, k) + c]; }
  double& at(int t, int k, int c) { return data_[offset(t, k) + c]; }

  Eigen::Map<const Eigen::VectorXd> joint(int t, int k) const {
    return {data_.data() + offset(t, k), dims_};
  }
  void set_joint(int t, int k, const Eigen::Ref<const Eigen::VectorXd>& value);

  bool same_shape(const PoseSequence& other) const;
  bool all_finite() const;
  std::span<const double> raw() const { return data_; }

  bool operator==(const PoseSequence&) const = default;

 private:
  std::size_t offset(int t, int k) const {
    return (static_cast<std::size_t>(t) * joints_ + k) * dims_;
  }

  int frames_ = 0;
  int joints_ = 0;
  int dims_ = 0;
  std::vector<double> data_;
};

struct RelationKind {
  enum class Domain { kSpatial, kTemporal };

  Domain domain = Domain::kSpatial;
  int duration = 0;  // nonzero for temporal relations

  static RelationKind spatial() { return {Domain::kSpatial, 0}; }
  static RelationKind temporal(int duration);

  bool is_spatial() const { return domain == Domain::kSpatial; }
  bool operator==(const RelationKind&) const = default;
};

struct RelationTarget {
  int joint = 0;
  int time = 0;
  bool operator==(const RelationTarget&) const = default;
};

// Index of the related joint: the parent at the same frame for spatial
// relations, the same joint `duration` frames back for temporal ones. The
// returned time may fall outside [0, T) for boundary queries.
RelationTarget relation(const JointTree& tree, int joint, int time,
                        const RelationKind& kind);

}  // namespace relfuse
