#include "relfuse/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/SparseCholesky>

namespace relfuse {

DurationSet::DurationSet(std::vector<int> durations)
    : durations_(std::move(durations)) {
  std::set<int> seen;
  for (int d : durations_) {
    if (d == 0) {
      throw InvariantError(ErrorCode::kZeroDuration,
                           "duration set cannot contain zero");
    }
    if (!seen.insert(d).second) {
      throw InvariantError(ErrorCode::kInvalidInput,
                           "duplicate duration " + std::to_string(d));
    }
  }
}

DurationSet DurationSet::forward() { return DurationSet({1}); }
DurationSet DurationSet::forward_backward() { return DurationSet({1, -1}); }
DurationSet DurationSet::multi_forward() { return DurationSet({1, 2, 3}); }
DurationSet DurationSet::multi_forward_backward() {
  return DurationSet({1, 2, 3, -1, -2, -3});
}

std::optional<DurationSet> DurationSet::preset(std::string_view name) {
  if (name == "f") return forward();
  if (name == "fb") return forward_backward();
  if (name == "mf") return multi_forward();
  if (name == "mfb") return multi_forward_backward();
  return std::nullopt;
}

bool DurationSet::contains(int duration) const {
  return std::find(durations_.begin(), durations_.end(), duration) !=
         durations_.end();
}

void TrackingProblem::validate() const {
  const TreeCheck check = validate_tree(tree);
  if (!check.ok) throw InvariantError(check.code, check.detail);

  const int joints = tree.joint_count();
  const int frames = single_frame.frames();
  if (single_frame.joint_count() != joints) {
    throw InvariantError(ErrorCode::kShapeMismatch,
                         "single-frame pose joint count does not match tree");
  }
  if (!single_frame.all_finite()) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "single-frame pose has nonfinite values");
  }

  if (bones.joint_count() != joints || bones.frames() != frames ||
      bones.dims() != single_frame.dims()) {
    throw InvariantError(ErrorCode::kShapeMismatch,
                         "bone table shape does not match the pose");
  }
  if (!bones.all_finite()) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "bone table has nonfinite values");
  }
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < joints; ++k) {
      if (bones.present(k, t) != !tree.is_root(k)) {
        throw InvariantError(
            ErrorCode::kSupportMismatch,
            "bone entries must exist exactly for non-root joints (joint " +
                std::to_string(k) + ", frame " + std::to_string(t) + ")");
      }
    }
  }

  if (static_cast<int>(config.gamma.size()) != durations.size()) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "gamma list length must match the duration set");
  }
  if (!(std::isfinite(config.alpha) && config.alpha >= 0.0) ||
      !(std::isfinite(config.data_weight) && config.data_weight >= 0.0)) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "alpha and data weight must be finite and >= 0");
  }
  for (double g : config.gamma) {
    if (!(std::isfinite(g) && g >= 0.0)) {
      throw InvariantError(ErrorCode::kInvalidInput,
                           "gamma weights must be finite and >= 0");
    }
  }

  for (int d : durations.values()) {
    const auto it = displacements.find(d);
    if (it == displacements.end()) {
      throw InvariantError(ErrorCode::kInvalidInput,
                           "missing displacement block for duration " +
                               std::to_string(d));
    }
    const RelationTable& table = it->second;
    if (table.joint_count() != joints || table.frames() != frames ||
        table.dims() != single_frame.dims()) {
      throw InvariantError(ErrorCode::kShapeMismatch,
                           "displacement table for duration " +
                               std::to_string(d) +
                               " does not match the pose shape");
    }
    if (!table.all_finite()) {
      throw InvariantError(ErrorCode::kInvalidInput,
                           "displacement table for duration " +
                               std::to_string(d) + " has nonfinite values");
    }
    for (int t = 0; t < frames; ++t) {
      const bool in_range = (t - d >= 0) && (t - d < frames);
      for (int k = 0; k < joints; ++k) {
        if (table.present(k, t) != in_range) {
          throw InvariantError(ErrorCode::kSupportMismatch,
                               "displacement support for duration " +
                                   std::to_string(d) +
                                   " must cover exactly the in-range frames");
        }
      }
    }
  }
}

TrackingProblem with_durations(const TrackingProblem& problem,
                               const DurationSet& durations,
                               std::vector<double> gamma) {
  TrackingProblem restricted = problem;
  restricted.durations = durations;
  if (gamma.empty()) {
    gamma.reserve(durations.values().size());
    for (int d : durations.values()) {
      double value = 1.0;
      for (int n = 0; n < problem.durations.size(); ++n) {
        if (problem.durations.values()[n] == d) {
          value = problem.config.gamma[n];
          break;
        }
      }
      gamma.push_back(value);
    }
  }
  restricted.config.gamma = std::move(gamma);
  return restricted;
}

double objective_value(const TrackingProblem& problem,
                       const PoseSequence& candidate) {
  if (!candidate.same_shape(problem.single_frame)) {
    throw InvariantError(ErrorCode::kShapeMismatch,
                         "candidate pose shape does not match the problem");
  }
  const int joints = problem.single_frame.joint_count();
  const int frames = problem.single_frame.frames();
  const double alpha = problem.config.alpha;

  double e = 0.0;
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < joints; ++k) {
      e += problem.config.data_weight *
           (candidate.joint(t, k) - problem.single_frame.joint(t, k))
               .squaredNorm();
      const auto parent = problem.tree.parent(k);
      if (parent.has_value() && alpha != 0.0) {
        e += alpha * (candidate.joint(t, k) - candidate.joint(t, *parent) -
                      problem.bones.vec(k, t))
                         .squaredNorm();
      }
      for (int n = 0; n < problem.durations.size(); ++n) {
        const int d = problem.durations.values()[n];
        const RelationTable& table = problem.displacements.at(d);
        if (!table.present(k, t)) continue;
        e += problem.config.gamma[n] *
             (candidate.joint(t, k) - candidate.joint(t - d, k) -
              table.vec(k, t))
                 .squaredNorm();
      }
    }
  }
  return e;
}

NormalSystem assemble_system(const TrackingProblem& problem) {
  problem.validate();
  const int joints = problem.single_frame.joint_count();
  const int frames = problem.single_frame.frames();
  const int dims = problem.single_frame.dims();
  const int unknowns = joints * frames;
  const auto index = [joints](int k, int t) { return t * joints + k; };

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(unknowns) *
                   (3 + 2 * problem.durations.size()));
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(unknowns, dims);

  const double w = problem.config.data_weight;
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < joints; ++k) {
      const int i = index(k, t);
      triplets.emplace_back(i, i, w);
      rhs.row(i) += w * problem.single_frame.joint(t, k).transpose();
    }
  }

  const double alpha = problem.config.alpha;
  if (alpha != 0.0) {
    for (int t = 0; t < frames; ++t) {
      for (int k = 0; k < joints; ++k) {
        const auto parent = problem.tree.parent(k);
        if (!parent.has_value()) continue;
        const int i = index(k, t);
        const int j = index(*parent, t);
        triplets.emplace_back(i, i, alpha);
        triplets.emplace_back(j, j, alpha);
        triplets.emplace_back(i, j, -alpha);
        triplets.emplace_back(j, i, -alpha);
        const auto bone = problem.bones.vec(k, t);
        rhs.row(i) += alpha * bone.transpose();
        rhs.row(j) -= alpha * bone.transpose();
      }
    }
  }

  for (int n = 0; n < problem.durations.size(); ++n) {
    const int d = problem.durations.values()[n];
    const double gamma = problem.config.gamma[n];
    if (gamma == 0.0) continue;
    const RelationTable& table = problem.displacements.at(d);
    for (int t = 0; t < frames; ++t) {
      for (int k = 0; k < joints; ++k) {
        if (!table.present(k, t)) continue;
        const int i = index(k, t);
        const int j = index(k, t - d);
        triplets.emplace_back(i, i, gamma);
        triplets.emplace_back(j, j, gamma);
        triplets.emplace_back(i, j, -gamma);
        triplets.emplace_back(j, i, -gamma);
        const auto displacement = table.vec(k, t);
        rhs.row(i) += gamma * displacement.transpose();
        rhs.row(j) -= gamma * displacement.transpose();
      }
    }
  }

  Eigen::SparseMatrix<double> matrix(unknowns, unknowns);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  return {std::move(matrix), std::move(rhs)};
}

namespace {

PoseSequence solution_from_columns(const TrackingProblem& problem,
                                   const Eigen::MatrixXd& columns) {
  const int joints = problem.single_frame.joint_count();
  PoseSequence solution(problem.single_frame.frames(), joints,
                        problem.single_frame.dims());
  for (int t = 0; t < solution.frames(); ++t) {
    for (int k = 0; k < joints; ++k) {
      for (int c = 0; c < solution.dims(); ++c) {
        solution.at(t, k, c) = columns(t * joints + k, c);
      }
    }
  }
  return solution;
}

// |A x - b| <= 1e-10 |b|, absolute 1e-12 when b = 0.
bool residual_ok(double residual, double rhs_norm) {
  return rhs_norm > 0.0 ? residual <= 1e-10 * rhs_norm : residual <= 1e-12;
}

}  // namespace

TrackedResult solve_tracking(const TrackingProblem& problem) {
  NormalSystem system = assemble_system(problem);
  const int dims = problem.single_frame.dims();

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factorization(
      system.matrix);
  if (factorization.info() != Eigen::Success) {
    throw SolverError(ErrorCode::kNotPositiveDefinite,
                      "sparse factorization failed; the normal matrix is not "
                      "positive definite");
  }
  const Eigen::VectorXd& pivots = factorization.vectorD();
  const double largest_pivot = pivots.cwiseAbs().maxCoeff();
  if (pivots.minCoeff() <= 1e-12 * std::max(largest_pivot, 1.0)) {
    throw SolverError(ErrorCode::kNotPositiveDefinite,
                      "normal matrix is singular or indefinite; the data "
                      "weight must stay positive");
  }

  Eigen::MatrixXd solution(system.matrix.rows(), dims);
  double worst_residual = 0.0;
  int refinements = 0;
  for (int c = 0; c < dims; ++c) {
    const Eigen::VectorXd b = system.rhs.col(c);
    Eigen::VectorXd x = factorization.solve(b);
    double residual = (b - system.matrix * x).norm();
    const double rhs_norm = b.norm();
    for (int pass = 0; pass < 4 && !residual_ok(residual, rhs_norm); ++pass) {
      x += factorization.solve(b - system.matrix * x);
      residual = (b - system.matrix * x).norm();
      ++refinements;
    }
    if (!residual_ok(residual, rhs_norm)) {
      throw SolverError(ErrorCode::kNotPositiveDefinite,
                        "residual contract not met; the normal matrix is "
                        "numerically singular");
    }
    worst_residual = std::max(worst_residual, residual);
    solution.col(c) = x;
  }

  TrackedResult result;
  result.solution = solution_from_columns(problem, solution);
  result.objective = objective_value(problem, result.solution);
  result.residual_norm = worst_residual;
  result.iterations = refinements;
  return result;
}

namespace {

// In-place lower-triangular Cholesky on a row-major n x n buffer.
bool cholesky_factor(std::vector<double>& a, int n) {
  for (int j = 0; j < n; ++j) {
    double diagonal = a[static_cast<std::size_t>(j) * n + j];
    for (int k = 0; k < j; ++k) {
      const double ljk = a[static_cast<std::size_t>(j) * n + k];
      diagonal -= ljk * ljk;
    }
    if (!(diagonal > 0.0)) return false;
    const double root = std::sqrt(diagonal);
    a[static_cast<std::size_t>(j) * n + j] = root;
    for (int i = j + 1; i < n; ++i) {
      double value = a[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k) {
        value -= a[static_cast<std::size_t>(i) * n + k] *
                 a[static_cast<std::size_t>(j) * n + k];
      }
      a[static_cast<std::size_t>(i) * n + j] = value / root;
    }
  }
  return true;
}

void cholesky_solve(const std::vector<double>& factor, int n,
                    std::vector<double>& x) {
  for (int i = 0; i < n; ++i) {  // L y = b
    double value = x[i];
    for (int k = 0; k < i; ++k) {
      value -= factor[static_cast<std::size_t>(i) * n + k] * x[k];
    }
    x[i] = value / factor[static_cast<std::size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {  // L^T x = y
    double value = x[i];
    for (int k = i + 1; k < n; ++k) {
      value -= factor[static_cast<std::size_t>(k) * n + i] * x[k];
    }
    x[i] = value / factor[static_cast<std::size_t>(i) * n + i];
  }
}

}  // namespace

TrackedResult dense_oracle_solve(const TrackingProblem& problem) {
  const int joints = problem.single_frame.joint_count();
  const int frames = problem.single_frame.frames();
  const int dims = problem.single_frame.dims();
  const int n = joints * frames;
  if (n > 10000) {
    throw SolverError(ErrorCode::kProblemTooLarge,
                      "dense oracle is limited to 10000 unknowns, got " +
                          std::to_string(n));
  }
  problem.validate();
  const auto index = [joints](int k, int t) { return t * joints + k; };

  // The oracle accumulates the normal matrix on its own rather than reusing
  // assemble_system, so the two solve routes stay independent.
  std::vector<double> matrix(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<std::vector<double>> rhs(
      static_cast<std::size_t>(dims), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  const auto add = [&](int i, int j, double value) {
    matrix[static_cast<std::size_t>(i) * n + j] += value;
  };

  const double w = problem.config.data_weight;
  const double alpha = problem.config.alpha;
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < joints; ++k) {
      const int i = index(k, t);
      add(i, i, w);
      for (int c = 0; c < dims; ++c) {
        rhs[c][i] += w * problem.single_frame.at(t, k, c);
      }
      const auto parent = problem.tree.parent(k);
      if (parent.has_value() && alpha != 0.0) {
        const int j = index(*parent, t);
        add(i, i, alpha);
        add(j, j, alpha);
        add(i, j, -alpha);
        add(j, i, -alpha);
        for (int c = 0; c < dims; ++c) {
          const double bone = problem.bones.vec(k, t)[c];
          rhs[c][i] += alpha * bone;
          rhs[c][j] -= alpha * bone;
        }
      }
      for (int m = 0; m < problem.durations.size(); ++m) {
        const int d = problem.durations.values()[m];
        const double gamma = problem.config.gamma[m];
        const RelationTable& table = problem.displacements.at(d);
        if (gamma == 0.0 || !table.present(k, t)) continue;
        const int j = index(k, t - d);
        add(i, i, gamma);
        add(j, j, gamma);
        add(i, j, -gamma);
        add(j, i, -gamma);
        for (int c = 0; c < dims; ++c) {
          const double displacement = table.vec(k, t)[c];
          rhs[c][i] += gamma * displacement;
          rhs[c][j] -= gamma * displacement;
        }
      }
    }
  }

  std::vector<double> residual_matrix = matrix;  // keep A for the residual
  if (!cholesky_factor(matrix, n)) {
    throw SolverError(ErrorCode::kNotPositiveDefinite,
                      "dense Cholesky hit a nonpositive pivot; the data "
                      "weight must stay positive");
  }

  Eigen::MatrixXd columns(n, dims);
  double worst_residual = 0.0;
  for (int c = 0; c < dims; ++c) {
    std::vector<double> x = rhs[c];
    cholesky_solve(matrix, n, x);
    double residual_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) {
        row += residual_matrix[static_cast<std::size_t>(i) * n + j] * x[j];
      }
      const double r = rhs[c][i] - row;
      residual_sq += r * r;
    }
    worst_residual = std::max(worst_residual, std::sqrt(residual_sq));
    for (int i = 0; i < n; ++i) columns(i, c) = x[i];
  }

  TrackedResult result;
  result.solution = solution_from_columns(problem, columns);
  result.objective = objective_value(problem, result.solution);
  result.residual_norm = worst_residual;
  result.iterations = 0;
  return result;
}

}  // namespace relfuse
