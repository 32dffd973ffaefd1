#include "relfuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace relfuse {
namespace {

enum StreamTag : std::uint64_t {
  kRootStream = 0x01,
  kAngleStream = 0x02,
  kBoneLengthStream = 0x03,
  kSingleNoiseStream = 0x11,
  kBoneNoiseStream = 0x12,
  kDisplNoiseStream = 0x13,
};

constexpr int kRootHarmonics = 3;
constexpr int kAngleHarmonics = 2;

struct Harmonic {
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;

  double eval(double s) const {
    return amplitude * std::sin(omega * s + phase);
  }
};

Harmonic sample_harmonic(Rng& rng, Range amplitude, Range frequency) {
  Harmonic h;
  h.amplitude = rng.uniform(amplitude.lo, amplitude.hi);
  h.omega = 2.0 * M_PI * rng.uniform(frequency.lo, frequency.hi);
  h.phase = rng.uniform(0.0, 2.0 * M_PI);
  return h;
}

void check_range(const Range& range, const char* what) {
  if (!(std::isfinite(range.lo) && std::isfinite(range.hi)) ||
      range.lo > range.hi || range.lo < 0.0) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         std::string(what) + " range must satisfy 0 <= lo <= hi");
  }
}

// Joints ordered parents-first.
std::vector<int> depth_order(const JointTree& tree) {
  const int count = tree.joint_count();
  std::vector<int> depth(count, 0);
  for (int k = 0; k < count; ++k) {
    int node = k;
    while (!tree.is_root(node)) {
      node = *tree.parent(node);
      ++depth[k];
    }
  }
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return depth[a] < depth[b]; });
  return order;
}

}  // namespace

double frame_rate_hz(FrameRate rate) {
  switch (rate) {
    case FrameRate::k25: return 25.0;
    case FrameRate::k8: return 8.0;
    case FrameRate::k2_5: return 2.5;
  }
  return 8.0;
}

std::optional<FrameRate> parse_frame_rate(double fps) {
  if (fps == 25.0) return FrameRate::k25;
  if (fps == 8.0) return FrameRate::k8;
  if (fps == 2.5) return FrameRate::k2_5;
  return std::nullopt;
}

PoseSequence generate_sequence(const MotionSpec& spec) {
  const TreeCheck check = validate_tree(spec.tree);
  if (!check.ok) throw InvariantError(check.code, check.detail);
  const int joints = spec.tree.joint_count();
  if (spec.frames < 2) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "motion needs at least two frames");
  }
  if (spec.dims != 2 && spec.dims != 3) {
    throw InvariantError(ErrorCode::kInvalidInput, "dims must be 2 or 3");
  }
  if (static_cast<int>(spec.bone_lengths_mm.size()) != joints) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "need one bone length per joint");
  }
  for (int k = 0; k < joints; ++k) {
    if (!spec.tree.is_root(k) && !(spec.bone_lengths_mm[k] > 0.0)) {
      throw InvariantError(ErrorCode::kInvalidInput,
                           "bone lengths must be positive");
    }
  }
  check_range(spec.root_amplitude_mm, "root amplitude");
  check_range(spec.angle_amplitude_rad, "angle amplitude");
  check_range(spec.frequency_hz, "frequency");

  const Rng base(spec.seed);
  const double dt = 1.0 / frame_rate_hz(spec.rate);

  std::vector<std::vector<Harmonic>> root(spec.dims);
  for (int c = 0; c < spec.dims; ++c) {
    for (int h = 0; h < kRootHarmonics; ++h) {
      Rng stream = base.substream({kRootStream, static_cast<std::uint64_t>(c),
                                   static_cast<std::uint64_t>(h)});
      root[c].push_back(
          sample_harmonic(stream, spec.root_amplitude_mm, spec.frequency_hz));
    }
  }

  // One or two direction angles per non-root joint, each a base angle plus
  // seeded harmonics.
  const int angles_per_joint = spec.dims == 3 ? 2 : 1;
  std::vector<std::vector<double>> base_angle(
      joints, std::vector<double>(angles_per_joint, 0.0));
  std::vector<std::vector<std::vector<Harmonic>>> swing(
      joints, std::vector<std::vector<Harmonic>>(angles_per_joint));
  for (int k = 0; k < joints; ++k) {
    if (spec.tree.is_root(k)) continue;
    for (int a = 0; a < angles_per_joint; ++a) {
      Rng stream = base.substream({kAngleStream, static_cast<std::uint64_t>(k),
                                   static_cast<std::uint64_t>(a)});
      base_angle[k][a] = stream.uniform(0.0, 2.0 * M_PI);
      for (int h = 0; h < kAngleHarmonics; ++h) {
        swing[k][a].push_back(sample_harmonic(stream, spec.angle_amplitude_rad,
                                              spec.frequency_hz));
      }
    }
  }

  const std::vector<int> order = depth_order(spec.tree);
  PoseSequence pose(spec.frames, joints, spec.dims);
  for (int t = 0; t < spec.frames; ++t) {
    const double s = t * dt;
    for (int k : order) {
      if (spec.tree.is_root(k)) {
        for (int c = 0; c < spec.dims; ++c) {
          double value = 0.0;
          for (const Harmonic& h : root[c]) value += h.eval(s);
          pose.at(t, k, c) = value;
        }
        continue;
      }
      const int parent = *spec.tree.parent(k);
      const double length = spec.bone_lengths_mm[k];
      double angle0 = base_angle[k][0];
      for (const Harmonic& h : swing[k][0]) angle0 += h.eval(s);
      if (spec.dims == 2) {
        pose.at(t, k, 0) = pose.at(t, parent, 0) + length * std::cos(angle0);
        pose.at(t, k, 1) = pose.at(t, parent, 1) + length * std::sin(angle0);
      } else {
        double angle1 = base_angle[k][1];
        for (const Harmonic& h : swing[k][1]) angle1 += h.eval(s);
        const double sin0 = std::sin(angle0);
        pose.at(t, k, 0) =
            pose.at(t, parent, 0) + length * sin0 * std::cos(angle1);
        pose.at(t, k, 1) =
            pose.at(t, parent, 1) + length * sin0 * std::sin(angle1);
        pose.at(t, k, 2) = pose.at(t, parent, 2) + length * std::cos(angle0);
      }
    }
  }
  return pose;
}

std::vector<double> sample_bone_lengths(const JointTree& tree, Range range_mm,
                                        std::uint64_t seed) {
  if (!(range_mm.lo > 0.0) || range_mm.lo > range_mm.hi) {
    throw InvariantError(ErrorCode::kInvalidInput,
                         "bone length range must satisfy 0 < lo <= hi");
  }
  const Rng base(seed);
  std::vector<double> lengths(tree.joint_count(), 0.0);
  for (int k = 0; k < tree.joint_count(); ++k) {
    if (tree.is_root(k)) continue;
    Rng stream =
        base.substream({kBoneLengthStream, static_cast<std::uint64_t>(k)});
    lengths[k] = stream.uniform(range_mm.lo, range_mm.hi);
  }
  return lengths;
}

PredictionSet corrupt_predictions(const JointTree& tree,
                                  const PoseSequence& ground_truth,
                                  const DurationSet& durations,
                                  const NoiseSpec& noise) {
  for (double sigma :
       {noise.sigma_single_mm, noise.sigma_bone_mm, noise.sigma_displ_mm}) {
    if (!(std::isfinite(sigma) && sigma >= 0.0)) {
      throw InvariantError(ErrorCode::kInvalidInput,
                           "noise sigmas must be finite and >= 0");
    }
  }
  const Rng base(noise.seed);
  const int joints = ground_truth.joint_count();
  const int frames = ground_truth.frames();
  const int dims = ground_truth.dims();

  PredictionSet out;
  out.single_frame = ground_truth;
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < joints; ++k) {
      Rng stream = base.substream({kSingleNoiseStream,
                                   static_cast<std::uint64_t>(k),
                                   static_cast<std::uint64_t>(t)});
      for (int c = 0; c < dims; ++c) {
        out.single_frame.at(t, k, c) += stream.normal(0.0, noise.sigma_single_mm);
      }
    }
  }

  out.bones = compute_bone_vectors(tree, ground_truth);
  Eigen::VectorXd value(dims);
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < joints; ++k) {
      if (!out.bones.present(k, t)) continue;
      Rng stream = base.substream({kBoneNoiseStream,
                                   static_cast<std::uint64_t>(k),
                                   static_cast<std::uint64_t>(t)});
      value = out.bones.vec(k, t);
      for (int c = 0; c < dims; ++c) {
        value[c] += stream.normal(0.0, noise.sigma_bone_mm);
      }
      out.bones.set(k, t, value);
    }
  }

  for (int d : durations.values()) {
    RelationTable table = compute_displacements(ground_truth, d);
    for (int t = 0; t < frames; ++t) {
      for (int k = 0; k < joints; ++k) {
        if (!table.present(k, t)) continue;
        Rng stream = base.substream(
            {kDisplNoiseStream,
             static_cast<std::uint64_t>(static_cast<std::int64_t>(d)),
             static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(t)});
        value = table.vec(k, t);
        for (int c = 0; c < dims; ++c) {
          value[c] += stream.normal(0.0, noise.sigma_displ_mm);
        }
        table.set(k, t, value);
      }
    }
    out.displacements.emplace(d, std::move(table));
  }
  return out;
}

TrackingProblem make_problem(const JointTree& tree, PredictionSet predictions,
                             DurationSet durations, TrackerConfig config) {
  if (config.gamma.empty()) {
    config.gamma.assign(durations.values().size(), 1.0);
  }
  TrackingProblem problem{tree,
                          std::move(predictions.single_frame),
                          std::move(predictions.bones),
                          std::move(predictions.displacements),
                          std::move(durations),
                          std::move(config)};
  problem.validate();
  return problem;
}

}  // namespace relfuse
