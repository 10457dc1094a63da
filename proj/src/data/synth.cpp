#include "gloc/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "gloc/common/errors.hpp"

namespace gloc::data {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Value/derivative pair so every channel has an exact analytic velocity.
struct Sig {
  double v = 0.0;
  double d = 0.0;
  Sig operator+(const Sig& o) const { return {v + o.v, d + o.d}; }
  Sig operator-(const Sig& o) const { return {v - o.v, d - o.d}; }
  Sig operator*(double s) const { return {v * s, d * s}; }
  Sig operator-() const { return {-v, -d}; }
};

Sig sig_const(double v) { return {v, 0.0}; }
Sig sig_sin(double omega, double t, double phase = 0.0) {
  return {std::sin(omega * t + phase), omega * std::cos(omega * t + phase)};
}
Sig sig_cos(double omega, double t, double phase = 0.0) {
  return {std::cos(omega * t + phase), -omega * std::sin(omega * t + phase)};
}
// (max(0, s))^2 of an inner signal: C1 swing gate.
Sig sig_gate(const Sig& s) {
  if (s.v <= 0.0) return {0.0, 0.0};
  return {s.v * s.v, 2.0 * s.v * s.d};
}
Sig sig_gauss(double t, double center, double sigma) {
  const double u = (t - center) / sigma;
  const double g = std::exp(-0.5 * u * u);
  return {g, -g * u / sigma};
}
Sig sig_cos_of(const Sig& s) {
  return {std::cos(s.v), -std::sin(s.v) * s.d};
}

struct BipedGeometry {
  int l_hip, l_knee, l_ankle, r_hip, r_knee, r_ankle;
  double thigh_len, shank_len, sole_drop;
};

BipedGeometry biped_geometry(const sim::RobotModel& model) {
  BipedGeometry g{};
  auto joint_index = [&](const std::string& name) {
    for (int j = 0; j < model.joint_count(); ++j)
      if (model.joints[j].name == name) return j;
    throw DataError("corpus synthesis requires the 6-joint biped (missing '" +
                    name + "')");
  };
  g.l_hip = joint_index("l_hip");
  g.l_knee = joint_index("l_knee");
  g.l_ankle = joint_index("l_ankle");
  g.r_hip = joint_index("r_hip");
  g.r_knee = joint_index("r_knee");
  g.r_ankle = joint_index("r_ankle");
  g.thigh_len = model.joints[g.l_knee].pivot.norm();
  g.shank_len = model.joints[g.l_ankle].pivot.norm();
  double sole = 0.05;
  for (const auto& c : model.contacts) {
    if (c.link == model.joints[g.l_ankle].child) sole = -c.offset.y();
  }
  g.sole_drop = sole;
  return g;
}

// One leg's joint signals.
struct LegPose {
  Sig hip, knee, ankle;
};

// Flat-foot ankle: world foot angle = pitch + hip + knee + ankle = 0.
Sig flat_ankle(const Sig& pitch, const Sig& hip, const Sig& knee) {
  return -(pitch + hip + knee);
}

// Root-to-sole drop for a flat-footed leg.
double leg_drop(const BipedGeometry& g, double hip, double knee) {
  return g.thigh_len * std::cos(hip) + g.shank_len * std::cos(hip + knee) +
         g.sole_drop;
}

struct GaitSample {
  Sig root_x, root_z, pitch;
  LegPose left, right;
};

using GaitFn = std::function<GaitSample(double t)>;

MotionClip assemble(const GaitFn& gait, const CorpusSpec& spec,
                    const sim::RobotModel& model, const BipedGeometry& g,
                    const std::string& id, const std::string& label) {
  MotionClip clip;
  clip.id = id;
  clip.label = label;
  clip.frame_rate = spec.frame_rate;
  clip.joint_count = model.joint_count();
  clip.keypoint_count = model.keypoint_count();
  const int frames =
      static_cast<int>(std::lround(spec.duration_s * spec.frame_rate)) + 1;
  clip.frames.resize(clip.channels(), frames);
  const int J = clip.joint_count;
  for (int i = 0; i < frames; ++i) {
    const double t = i / spec.frame_rate;
    const GaitSample s = gait(t);
    auto col = clip.frames.col(i);
    col[0] = s.root_x.v;
    col[1] = s.root_z.v;
    col[2] = s.pitch.v;
    col[3] = s.root_x.d;
    col[4] = s.root_z.d;
    col[5] = s.pitch.d;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(J);
    Eigen::VectorXd qd = Eigen::VectorXd::Zero(J);
    q[g.l_hip] = s.left.hip.v;
    q[g.l_knee] = s.left.knee.v;
    q[g.l_ankle] = s.left.ankle.v;
    q[g.r_hip] = s.right.hip.v;
    q[g.r_knee] = s.right.knee.v;
    q[g.r_ankle] = s.right.ankle.v;
    qd[g.l_hip] = s.left.hip.d;
    qd[g.l_knee] = s.left.knee.d;
    qd[g.l_ankle] = s.left.ankle.d;
    qd[g.r_hip] = s.right.hip.d;
    qd[g.r_knee] = s.right.knee.d;
    qd[g.r_ankle] = s.right.ankle.d;
    col.segment(6, J) = q;
    col.segment(6 + J, J) = qd;
    const Eigen::Matrix2Xd kp = sim::fk_keypoints(
        model, Eigen::Vector2d(col[0], col[1]), col[2], q);
    for (int k = 0; k < clip.keypoint_count; ++k) {
      col[6 + 2 * J + 2 * k] = kp(0, k);
      col[6 + 2 * J + 2 * k + 1] = kp(1, k);
    }
  }
  // Quantize to the 32-bit storage precision so in-memory clips match
  // their serialized form bit for bit.
  clip.frames = clip.frames.cast<float>().cast<double>();
  return clip;
}

GaitSample walk_sample(double t, const BipedGeometry& g, double cadence,
                       double stride, double root_height, double lean) {
  const double omega = kTwoPi * cadence;
  const double reach = g.thigh_len + g.shank_len;
  const double hip_amp = std::asin(std::min(0.9, stride / (2.0 * reach)));
  const double knee_amp = 0.30;
  const double speed = stride * cadence;

  GaitSample s;
  s.pitch = sig_const(lean);
  s.root_x = Sig{speed * t, speed};
  const Sig bob = sig_cos(2.0 * omega, t) * 0.006;
  s.root_z = Sig{root_height + bob.v - 0.006, bob.d};

  s.left.hip = -sig_sin(omega, t) * hip_amp;
  s.right.hip = sig_sin(omega, t) * hip_amp;
  // Swing knee flexion peaks at mid-swing (hip crossing zero forward).
  s.left.knee = sig_gate(sig_cos(omega, t)) * knee_amp + sig_const(0.05);
  s.right.knee =
      sig_gate(-sig_cos(omega, t)) * knee_amp + sig_const(0.05);
  s.left.ankle = flat_ankle(s.pitch, s.left.hip, s.left.knee);
  s.right.ankle = flat_ankle(s.pitch, s.right.hip, s.right.knee);
  return s;
}

GaitSample pump_sample(double t, const BipedGeometry& g, double cadence,
                       double depth, double knee0) {
  // Symmetric crouch-extend with feet planted: hip = -knee/2 keeps the
  // ankle directly below the hip, so the closed-form root height is exact.
  const double omega = kTwoPi * cadence;
  const Sig knee = sig_const(knee0) + (sig_const(1.0) - sig_cos(omega, t)) *
                                          (0.5 * depth);
  const Sig hip = -knee * 0.5;
  GaitSample s;
  s.pitch = sig_const(0.0);
  s.root_x = sig_const(0.0);
  const Sig half = knee * 0.5;
  const Sig cos_half = sig_cos_of(half);
  s.root_z = cos_half * (g.thigh_len + g.shank_len) + sig_const(g.sole_drop);
  s.left.hip = s.right.hip = hip;
  s.left.knee = s.right.knee = knee;
  s.left.ankle = flat_ankle(s.pitch, hip, knee);
  s.right.ankle = s.left.ankle;
  return s;
}

GaitSample kick_sample(double t, const BipedGeometry& g, double amplitude,
                       double duration_s, double knee0) {
  GaitSample s;
  s.pitch = sig_const(0.0);
  s.root_x = sig_const(0.0);
  s.root_z = sig_const(leg_drop(g, -knee0 * 0.5, knee0));
  const Sig hip0 = sig_const(-knee0 * 0.5);
  s.left.hip = hip0;
  s.left.knee = sig_const(knee0);
  s.left.ankle = flat_ankle(s.pitch, s.left.hip, s.left.knee);
  // Right leg swings forward in a smooth pulse centred mid-clip, with a
  // knee tuck on the way through.
  const double center = duration_s * 0.5;
  const Sig pulse = sig_gauss(t, center, 0.5);
  const Sig tuck = sig_gauss(t, center - 0.35, 0.45);
  s.right.hip = hip0 - pulse * amplitude;
  s.right.knee = sig_const(knee0) + tuck * (0.6 * amplitude);
  s.right.ankle = flat_ankle(s.pitch, s.right.hip, s.right.knee);
  return s;
}

GaitSample stand_sample(double knee0, const BipedGeometry& g) {
  GaitSample s;
  s.pitch = sig_const(0.0);
  s.root_x = sig_const(0.0);
  s.root_z = sig_const(leg_drop(g, -knee0 * 0.5, knee0));
  s.left.hip = s.right.hip = sig_const(-knee0 * 0.5);
  s.left.knee = s.right.knee = sig_const(knee0);
  s.left.ankle = s.right.ankle =
      flat_ankle(s.pitch, s.left.hip, s.left.knee);
  return s;
}

std::string walk_label(double cadence, const CorpusSpec& spec) {
  const double span = spec.walk_cadence.hi - spec.walk_cadence.lo;
  const double u = span > 0 ? (cadence - spec.walk_cadence.lo) / span : 0.5;
  if (u < 0.34) return "walk forward slowly";
  if (u > 0.66) return "walk forward quickly";
  return "walk forward";
}

}  // namespace

MotionClip synthesize_clip(const std::string& family, const CorpusSpec& spec,
                           const sim::RobotModel& model, std::uint64_t seed,
                           const std::string& clip_id) {
  const BipedGeometry g = biped_geometry(model);
  Rng rng(seed);
  if (family == "walk") {
    const double cadence = spec.walk_cadence.sample(rng);
    const double stride = spec.walk_stride.sample(rng);
    const double lean = rng.uniform(0.0, 0.03);
    // Root height: highest root-to-sole drop over one cycle, scanned once.
    double h0 = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double t = i / (400.0 * cadence);
      GaitSample s = walk_sample(t, g, cadence, stride, 0.0, lean);
      const double dl = leg_drop(g, lean + s.left.hip.v, s.left.knee.v);
      const double dr = leg_drop(g, lean + s.right.hip.v, s.right.knee.v);
      const double bob = 0.006 * std::cos(2.0 * kTwoPi * cadence * t) - 0.006;
      h0 = std::max(h0, std::max(dl, dr) - bob);
    }
    const double height = h0;
    return assemble(
        [&, cadence, stride, height, lean](double t) {
          return walk_sample(t, g, cadence, stride, height, lean);
        },
        spec, model, g, clip_id, walk_label(cadence, spec));
  }
  if (family == "hop") {
    const double cadence = spec.hop_cadence.sample(rng);
    const double depth = spec.hop_depth.sample(rng);
    return assemble(
        [&, cadence, depth](double t) {
          return pump_sample(t, g, cadence, depth, 0.15);
        },
        spec, model, g, clip_id, "hop in place");
  }
  if (family == "squat") {
    const double cadence = spec.squat_cadence.sample(rng);
    const double depth = spec.squat_depth.sample(rng);
    return assemble(
        [&, cadence, depth](double t) {
          return pump_sample(t, g, cadence, depth, 0.1);
        },
        spec, model, g, clip_id, "squat down");
  }
  if (family == "kick") {
    const double amp = spec.kick_amplitude.sample(rng);
    return assemble(
        [&, amp](double t) {
          return kick_sample(t, g, amp, spec.duration_s, 0.25);
        },
        spec, model, g, clip_id, "kick forward");
  }
  if (family == "stand") {
    const double knee0 = rng.uniform(0.08, 0.2);
    return assemble([&, knee0](double) { return stand_sample(knee0, g); },
                    spec, model, g, clip_id, "stand still");
  }
  throw DataError("synthesize_clip: unknown motion family '" + family + "'");
}

std::vector<MotionClip> synthesize_corpus(const CorpusSpec& spec,
                                          const sim::RobotModel& model,
                                          std::uint64_t seed) {
  std::vector<MotionClip> clips;
  Rng root(seed);
  for (const auto& [family, count] : spec.families) {
    for (int i = 0; i < count; ++i) {
      char id[64];
      std::snprintf(id, sizeof(id), "%s_%03d", family.c_str(), i);
      const std::uint64_t clip_seed = root.fork(Rng::hash_str(id)).next_u64();
      clips.push_back(synthesize_clip(family, spec, model, clip_seed, id));
    }
  }
  return clips;
}

}  // namespace gloc::data
