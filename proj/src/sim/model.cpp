#include "gloc/sim/model.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "gloc/common/errors.hpp"

namespace gloc::sim {

Eigen::VectorXd RobotModel::default_pose() const {
  Eigen::VectorXd q(joint_count());
  for (int j = 0; j < joint_count(); ++j) q[j] = joints[j].default_q;
  return q;
}

Eigen::VectorXd RobotModel::torque_limits() const {
  Eigen::VectorXd t(joint_count());
  for (int j = 0; j < joint_count(); ++j) t[j] = joints[j].torque_limit;
  return t;
}

Eigen::VectorXd RobotModel::joint_lower() const {
  Eigen::VectorXd t(joint_count());
  for (int j = 0; j < joint_count(); ++j) t[j] = joints[j].q_min;
  return t;
}

Eigen::VectorXd RobotModel::joint_upper() const {
  Eigen::VectorXd t(joint_count());
  for (int j = 0; j < joint_count(); ++j) t[j] = joints[j].q_max;
  return t;
}

int RobotModel::link_index(const std::string& link_name) const {
  for (int i = 0; i < link_count(); ++i)
    if (links[i].name == link_name) return i;
  throw DataError("robot model: unknown link '" + link_name + "'");
}

int RobotModel::parent_joint_of_link(int link) const {
  for (int j = 0; j < joint_count(); ++j)
    if (joints[j].child == link) return j;
  return -1;
}

void RobotModel::validate() const {
  if (links.empty()) throw DataError("robot model: no links");
  for (int j = 0; j < joint_count(); ++j) {
    const JointSpec& jt = joints[j];
    if (jt.child != j + 1)
      throw DataError("robot model: joints must be listed in tree order");
    if (jt.parent < 0 || jt.parent >= jt.child)
      throw DataError("robot model: joint '" + jt.name +
                      "' parent must precede child");
    if (!(std::isfinite(jt.q_min) && std::isfinite(jt.q_max) &&
          jt.q_min < jt.q_max))
      throw DataError("robot model: joint '" + jt.name +
                      "' needs finite position limits");
    if (!(std::isfinite(jt.torque_limit) && jt.torque_limit > 0.0))
      throw DataError("robot model: joint '" + jt.name +
                      "' needs a finite torque limit");
  }
  for (const auto& kp : keypoints)
    if (kp.link < 0 || kp.link >= link_count())
      throw DataError("robot model: keypoint '" + kp.name +
                      "' references an unknown link");
  for (const auto& cp : contacts)
    if (cp.link < 0 || cp.link >= link_count())
      throw DataError("robot model: contact references an unknown link");
  for (int f : foot_links)
    if (f < 0 || f >= link_count())
      throw DataError("robot model: foot references an unknown link");
}

RobotModel parse_robot_model(const std::string& text,
                             const std::string& origin) {
  RobotModel m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw DataError(origin + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "robot") {
      ls >> m.name;
    } else if (kw == "gravity") {
      if (!(ls >> m.gravity)) fail("gravity: expected value");
    } else if (kw == "contact_stiffness") {
      if (!(ls >> m.contact_stiffness)) fail("expected value");
    } else if (kw == "contact_damping") {
      if (!(ls >> m.contact_damping)) fail("expected value");
      m.contact_tangent_damping = m.contact_damping;
    } else if (kw == "link") {
      LinkSpec l;
      std::string f1, f2, f3;
      if (!(ls >> l.name >> f1 >> l.mass >> f2 >> l.inertia >> f3 >>
            l.com.x() >> l.com.y()) ||
          f1 != "mass" || f2 != "inertia" || f3 != "com")
        fail("link: expected '<name> mass <kg> inertia <kgm2> com <x> <z>'");
      m.links.push_back(l);
    } else if (kw == "joint") {
      JointSpec j;
      std::string parent, child, f;
      ls >> j.name >> parent >> child;
      j.parent = m.link_index(parent);
      j.child = m.link_index(child);
      while (ls >> f) {
        if (f == "pivot") {
          if (!(ls >> j.pivot.x() >> j.pivot.y())) fail("joint pivot");
        } else if (f == "limits") {
          if (!(ls >> j.q_min >> j.q_max)) fail("joint limits");
        } else if (f == "torque") {
          if (!(ls >> j.torque_limit)) fail("joint torque");
        } else if (f == "kp") {
          if (!(ls >> j.kp)) fail("joint kp");
        } else if (f == "kd") {
          if (!(ls >> j.kd)) fail("joint kd");
        } else if (f == "default") {
          if (!(ls >> j.default_q)) fail("joint default");
        } else {
          fail("joint: unknown field '" + f + "'");
        }
      }
      m.joints.push_back(j);
    } else if (kw == "keypoint") {
      KeypointSpec k;
      std::string link;
      if (!(ls >> k.name >> link >> k.offset.x() >> k.offset.y()))
        fail("keypoint: expected '<name> <link> <x> <z>'");
      k.link = m.link_index(link);
      m.keypoints.push_back(k);
    } else if (kw == "contact") {
      ContactPointSpec c;
      std::string link;
      if (!(ls >> link >> c.offset.x() >> c.offset.y()))
        fail("contact: expected '<link> <x> <z>'");
      c.link = m.link_index(link);
      m.contacts.push_back(c);
    } else if (kw == "foot") {
      std::string link;
      if (!(ls >> link)) fail("foot: expected link name");
      m.foot_links.push_back(m.link_index(link));
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }
  m.validate();
  return m;
}

RobotModel load_robot_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("robot model: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_robot_model(ss.str(), path);
}

}  // namespace gloc::sim
