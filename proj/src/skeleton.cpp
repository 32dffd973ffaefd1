#include "relfuse/skeleton.hpp"

#include <cmath>
#include <cstddef>

namespace relfuse {

JointTree::JointTree(std::vector<std::optional<int>> parents)
    : parents_(std::move(parents)) {}

JointTree JointTree::from_parent_indices(std::span<const int> parents) {
  std::vector<std::optional<int>> converted;
  converted.reserve(parents.size());
  for (int p : parents) {
    converted.push_back(p < 0 ? std::nullopt : std::optional<int>(p));
  }
  return JointTree(std::move(converted));
}

JointTree JointTree::chain(int joint_count) {
  std::vector<std::optional<int>> parents(static_cast<std::size_t>(joint_count));
  for (int k = 1; k < joint_count; ++k) parents[k] = k - 1;
  return JointTree(std::move(parents));
}

JointTree JointTree::star(int joint_count) {
  std::vector<std::optional<int>> parents(static_cast<std::size_t>(joint_count));
  for (int k = 1; k < joint_count; ++k) parents[k] = 0;
  return JointTree(std::move(parents));
}

int JointTree::root() const {
  for (int k = 0; k < joint_count(); ++k) {
    if (is_root(k)) return k;
  }
  throw InvariantError(ErrorCode::kCycleDetected, "tree has no root");
}

std::vector<int> JointTree::parent_indices() const {
  std::vector<int> out;
  out.reserve(parents_.size());
  for (const auto& p : parents_) out.push_back(p.value_or(-1));
  return out;
}

TreeCheck validate_tree(const JointTree& tree) {
  const int count = tree.joint_count();
  if (count < 1) {
    return {false, ErrorCode::kInvalidInput, "tree must have at least one joint"};
  }

  int roots = 0;
  for (int k = 0; k < count; ++k) {
    const auto parent = tree.parent(k);
    if (!parent.has_value()) {
      ++roots;
      continue;
    }
    if (*parent < 0 || *parent >= count) {
      return {false, ErrorCode::kDanglingParent,
              "joint " + std::to_string(k) + " has parent " +
                  std::to_string(*parent) + " outside [0, " +
                  std::to_string(count) + ")"};
    }
  }
  if (roots > 1) {
    return {false, ErrorCode::kMultipleRoots,
            std::to_string(roots) + " joints have no parent"};
  }
  if (roots == 0) {
    return {false, ErrorCode::kCycleDetected, "every joint has a parent"};
  }

  // Walk parent pointers from each joint; exceeding the joint count means
  // the walk revisited a node.
  for (int k = 0; k < count; ++k) {
    int node = k;
    int steps = 0;
    while (!tree.is_root(node)) {
      node = *tree.parent(node);
      if (++steps > count) {
        return {false, ErrorCode::kCycleDetected,
                "parent chain from joint " + std::to_string(k) +
                    " never reaches the root"};
      }
    }
  }
  return {};
}

PoseSequence::PoseSequence(int frames, int joint_count, int dims)
    : frames_(frames), joints_(joint_count), dims_(dims) {
  if (frames < 1 || joint_count < 1) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "pose sequence needs at least one frame and joint");
  }
  if (dims != 2 && dims != 3) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "dims must be 2 or 3, got " + std::to_string(dims));
  }
  data_.assign(static_cast<std::size_t>(frames) * joint_count * dims, 0.0);
}

void PoseSequence::set_joint(int t, int k,
                             const Eigen::Ref<const Eigen::VectorXd>& value) {
  if (value.size() != dims_) {
    throw InvariantError(ErrorCode::kShapeMismatch,
                         "joint value has wrong dimension");
  }
  for (int c = 0; c < dims_; ++c) at(t, k, c) = value[c];
}

bool PoseSequence::same_shape(const PoseSequence& other) const {
  return frames_ == other.frames_ && joints_ == other.joints_ &&
         dims_ == other.dims_;
}

bool PoseSequence::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

RelationKind RelationKind::temporal(int duration) {
  if (duration == 0) {
    throw InvariantError(ErrorCode::kZeroDuration,
                         "temporal relation needs a nonzero duration");
  }
  return {Domain::kTemporal, duration};
}

RelationTarget relation(const JointTree& tree, int joint, int time,
                        const RelationKind& kind) {
  if (joint < 0 || joint >= tree.joint_count()) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "joint index " + std::to_string(joint) +
                             " outside [0, " +
                             std::to_string(tree.joint_count()) + ")");
  }
  if (kind.is_spatial()) {
    const auto parent = tree.parent(joint);
    if (!parent.has_value()) {
      throw InvariantError(ErrorCode::kRootHasNoParent,
                           "joint " + std::to_string(joint) +
                               " is the root and has no spatial relation");
    }
    return {*parent, time};
  }
  if (kind.duration == 0) {
    throw InvariantError(ErrorCode::kZeroDuration,
                         "temporal relation needs a nonzero duration");
  }
  return {joint, time - kind.duration};
}

}  // namespace relfuse
