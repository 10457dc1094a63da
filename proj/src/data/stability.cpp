#include "gloc/data/stability.hpp"

#include <algorithm>

namespace gloc::data {

bool stability_decision(const std::vector<std::uint8_t>& stable,
                        int max_run) {
  if (stable.empty()) return false;
  if (!stable.front() || !stable.back()) return false;
  int run = 0, longest = 0;
  for (std::uint8_t s : stable) {
    run = s ? 0 : run + 1;
    longest = std::max(longest, run);
  }
  return longest < max_run;
}

StabilityResult stability_filter(const MotionClip& clip,
                                 const sim::RobotModel& model,
                                 const StabilityParams& params) {
  StabilityResult result;
  const int frames = clip.frame_count();
  result.stable.resize(frames, 0);

  // Foot keypoint indices from the model.
  std::vector<int> foot_kp;
  for (int k = 0; k < model.keypoint_count(); ++k) {
    const int link = model.keypoints[k].link;
    if (std::find(model.foot_links.begin(), model.foot_links.end(), link) !=
        model.foot_links.end())
      foot_kp.push_back(k);
  }

  double total_mass = 0.0;
  for (const auto& l : model.links) total_mass += l.mass;

  for (int f = 0; f < frames; ++f) {
    // CoM from FK at this frame's configuration.
    const auto view = clip.frame_view(f);
    auto poses = sim::fk_poses(model, view.root_pos, view.pitch, view.q);
    double com_x = 0.0;
    for (int i = 0; i < model.link_count(); ++i) {
      const double c = std::cos(poses[i].theta), s = std::sin(poses[i].theta);
      const Eigen::Vector2d& o = model.links[i].com;
      com_x += model.links[i].mass *
               (poses[i].origin.x() + c * o.x() + s * o.y());
    }
    com_x /= total_mass;

    // Kinematic CoP: centroid of low foot keypoints.
    double cop_x = 0.0;
    int n_low = 0;
    for (int k : foot_kp) {
      const Eigen::Vector2d p = clip.keypoint(f, k);
      if (p.y() < params.contact_height) {
        cop_x += p.x();
        ++n_low;
      }
    }
    if (n_low == 0) {
      result.stable[f] = 0;
      continue;
    }
    cop_x /= n_low;
    result.stable[f] = std::abs(com_x - cop_x) < params.epsilon_stab ? 1 : 0;
  }

  int run = 0;
  for (std::uint8_t s : result.stable) {
    run = s ? 0 : run + 1;
    result.longest_unstable_run = std::max(result.longest_unstable_run, run);
  }
  result.keep = stability_decision(result.stable, params.max_unstable_run);
  return result;
}

}  // namespace gloc::data
