#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "relfuse/relations.hpp"
#include "relfuse/skeleton.hpp"

namespace relfuse {

// Ordered set of signed temporal spans whose displacement constraints enter
// the tracking objective.
class DurationSet {
 public:
  DurationSet() = default;
  explicit DurationSet(std::vector<int> durations);

  static DurationSet forward();                 // {1}
  static DurationSet forward_backward();        // {1, -1}
  static DurationSet multi_forward();           // {1, 2, 3}
  static DurationSet multi_forward_backward();  // {1, 2, 3, -1, -2, -3}
  static std::optional<DurationSet> preset(std::string_view name);

  const std::vector<int>& values() const { return durations_; }
  int size() const { return static_cast<int>(durations_.size()); }
  bool contains(int duration) const;

  bool operator==(const DurationSet&) const = default;

 private:
  std::vector<int> durations_;
};

struct TrackerConfig {
  double alpha = 1.0;         // bone term weight
  std::vector<double> gamma;  // one displacement weight per duration
  double data_weight = 1.0;   // single-frame term; fixed at 1 in normal use
};

// Inputs of the spatiotemporal tracking objective
//
//   e = sum_t sum_k ( w |x_k^t - J_k^t|^2
//                   + alpha |x_k^t - x_parent(k)^t - B_k^t|^2        (non-root)
//                   + sum_n gamma_n |x_k^t - x_k^{t-d_n} - D_k^{t,d_n}|^2 )
//
// Temporal terms whose source frame falls outside the sequence are dropped.
struct TrackingProblem {
  JointTree tree;
  PoseSequence single_frame;
  RelationTable bones;                        // full support on non-root joints
  std::map<int, RelationTable> displacements;  // keyed by duration
  DurationSet durations;
  TrackerConfig config;

  void validate() const;  // throws InvariantError
};

// Restricts a problem to a different duration set. Gammas are carried over
// per duration where they match, defaulting to 1; pass explicit gammas to
// override. Displacement tables for the requested durations must exist.
TrackingProblem with_durations(const TrackingProblem& problem,
                               const DurationSet& durations,
                               std::vector<double> gamma = {});

struct TrackedResult {
  PoseSequence solution;
  double objective = 0.0;
  double residual_norm = 0.0;  // max over dimensions of |A x - b|_2
  int iterations = 0;          // refinement passes beyond the direct solve
};

double objective_value(const TrackingProblem& problem,
                       const PoseSequence& candidate);

// Normal equations of the objective: one shared symmetric positive-definite
// matrix, one right-hand-side column per dimension. Unknown (k, t) sits at
// row t * K + k.
struct NormalSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::MatrixXd rhs;
};

NormalSystem assemble_system(const TrackingProblem& problem);

// Sparse Cholesky solve of the normal equations, with iterative refinement
// until the per-dimension residual meets |A x - b| <= 1e-10 |b| (absolute
// 1e-12 when b = 0).
TrackedResult solve_tracking(const TrackingProblem& problem);

// Verification oracle: assembles the dense normal matrix directly from the
// problem and solves it with a self-contained Cholesky factorization. Limited
// to K * T <= 10000 unknowns per dimension.
TrackedResult dense_oracle_solve(const TrackingProblem& problem);

}  // namespace relfuse
