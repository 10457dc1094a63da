#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace gloc::sim {

// Planar articulated robot description. Links form a tree rooted at
// links[0]; joint j attaches child link j+1 to its parent, revolute about
// the out-of-plane axis. All quantities SI; the plane is (x forward,
// z up), pitch positive leaning forward.
struct LinkSpec {
  std::string name;
  double mass = 0.0;       // kg
  double inertia = 0.0;    // kg m^2 about the link COM
  Eigen::Vector2d com = Eigen::Vector2d::Zero();  // in link frame
};

struct JointSpec {
  std::string name;
  int parent = -1;  // link index
  int child = -1;   // link index (== joint index + 1)
  Eigen::Vector2d pivot = Eigen::Vector2d::Zero();  // in parent frame
  double q_min = -3.14, q_max = 3.14;  // rad
  double torque_limit = 100.0;         // N m
  double kp = 50.0, kd = 1.0;          // default PD gains
  double default_q = 0.0;              // default pose angle
};

struct KeypointSpec {
  std::string name;
  int link = -1;
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();  // in link frame
};

struct ContactPointSpec {
  int link = -1;
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
};

struct RobotModel {
  std::string name;
  double gravity = 9.81;
  std::vector<LinkSpec> links;
  std::vector<JointSpec> joints;
  std::vector<KeypointSpec> keypoints;
  std::vector<ContactPointSpec> contacts;
  std::vector<int> foot_links;
  double contact_stiffness = 2e4;   // N/m
  double contact_damping = 2e2;     // N s/m
  double contact_tangent_damping = 2e2;

  int joint_count() const { return static_cast<int>(joints.size()); }
  int link_count() const { return static_cast<int>(links.size()); }
  int keypoint_count() const { return static_cast<int>(keypoints.size()); }
  int foot_count() const { return static_cast<int>(foot_links.size()); }

  Eigen::VectorXd default_pose() const;
  Eigen::VectorXd torque_limits() const;
  Eigen::VectorXd joint_lower() const;
  Eigen::VectorXd joint_upper() const;
  int link_index(const std::string& link_name) const;
  // Parent joint index of a link (-1 for the root).
  int parent_joint_of_link(int link) const;

  // Throws DataError on structural problems (bad tree order, missing
  // limits, keypoints referencing unknown links).
  void validate() const;
};

// Parses the structured text description (see docs/formats.md).
RobotModel load_robot_model(const std::string& path);
RobotModel parse_robot_model(const std::string& text, const std::string& origin);

}  // namespace gloc::sim
