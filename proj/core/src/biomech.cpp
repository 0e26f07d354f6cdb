#include "fatiguekit/biomech.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fatiguekit {

namespace {

constexpr double rad_to_deg = 180.0 / std::numbers::pi;

void check_fraction(double value, const char* key, double upper) {
  if (!std::isfinite(value) || !(value > 0.0) || !(value < upper))
    throw ConfigError(std::string(key) + " must lie in (0, " +
                      std::to_string(upper) + "); got " +
                      std::to_string(value));
}

void check_frame(const MarkerFrame& f) {
  if (!f.shoulder.finite() || !f.elbow.finite() || !f.wrist.finite() ||
      !f.drill.finite())
    throw ValidationError("marker frame has non-finite coordinates");
  if (!((f.shoulder - f.elbow).norm() > 0.0))
    throw ValidationError("degenerate marker frame: shoulder and elbow coincide");
  if (!((f.elbow - f.wrist).norm() > 0.0))
    throw ValidationError("degenerate marker frame: elbow and wrist coincide");
}

Vec3 project_sagittal(const Vec3& v) { return {v.x, 0.0, v.z}; }

// Angle between two vectors already lying in the sagittal plane, degrees.
double angle_between_deg(const Vec3& a, const Vec3& b) {
  const double cross = a.z * b.x - a.x * b.z;
  const double dot = a.x * b.x + a.z * b.z;
  return std::atan2(std::abs(cross), dot) * rad_to_deg;
}

}  // namespace

void SegmentCoefficients::validate() const {
  check_fraction(mass_fraction_upper_arm, "mass_fraction_upper_arm", 0.1);
  check_fraction(mass_fraction_forearm_hand, "mass_fraction_forearm_hand", 0.1);
  check_fraction(com_fraction_upper_arm, "com_fraction_upper_arm", 1.0);
  check_fraction(com_fraction_forearm, "com_fraction_forearm", 1.0);
}

void Anthropometry::validate() const {
  if (!(body_mass_kg > 0.0)) throw ValidationError("body mass must be positive");
  if (!(stature_m > 0.0)) throw ValidationError("stature must be positive");
  if (!(upper_arm_length_m > 0.0))
    throw ValidationError("upper arm length must be positive");
  if (!(forearm_length_m > 0.0))
    throw ValidationError("forearm length must be positive");
  coefficients.validate();
}

JointMoment moment_load(const MarkerFrame& frame, const SegmentForces& forces,
                        MomentArmModel model,
                        const SegmentCoefficients& coefficients) {
  check_frame(frame);

  const Vec3& s = frame.shoulder;
  Vec3 arm_upper;    // load point of the upper-arm weight, relative to S
  Vec3 arm_forearm;  // load point of the forearm weight, relative to S
  if (model == MomentArmModel::segment_midpoints) {
    arm_upper = (frame.elbow - s) * 0.5;
    arm_forearm = (frame.wrist + frame.elbow) * 0.5 - s;
  } else {
    coefficients.validate();
    arm_upper = (frame.elbow - s) * coefficients.com_fraction_upper_arm;
    arm_forearm = (frame.elbow - s) +
                  (frame.wrist - frame.elbow) * coefficients.com_fraction_forearm;
  }
  const Vec3 arm_machine = (frame.drill + frame.wrist) * 0.5 - s;
  const Vec3 arm_drill = frame.drill - s;

  JointMoment result;
  result.torque = arm_upper.cross(forces.upper_arm_weight) +
                  arm_forearm.cross(forces.forearm_weight) +
                  arm_machine.cross(forces.machine_weight) +
                  arm_drill.cross(forces.drill_force);

  // Flexion component from the sagittal projection of both arms and forces.
  const auto flex = [](const Vec3& arm, const Vec3& force) {
    const Vec3 a = project_sagittal(arm);
    const Vec3 f = project_sagittal(force);
    return a.z * f.x - a.x * f.z;  // y-component of a x f
  };
  result.flexion_nm = flex(arm_upper, forces.upper_arm_weight) +
                      flex(arm_forearm, forces.forearm_weight) +
                      flex(arm_machine, forces.machine_weight) +
                      flex(arm_drill, forces.drill_force);
  result.out_of_plane_nm = std::hypot(result.torque.x, result.torque.z);
  return result;
}

SegmentForces segment_forces_from_anthropometry(const Anthropometry& anthro,
                                                double machine_mass_kg,
                                                double drill_force_n,
                                                const Vec3& drill_direction) {
  if (!(anthro.body_mass_kg >= 0.0) || !std::isfinite(anthro.body_mass_kg))
    throw ValidationError("body mass must be finite and nonnegative");
  anthro.coefficients.validate();
  if (!(machine_mass_kg >= 0.0))
    throw ValidationError("machine mass must be nonnegative");
  if (!(drill_force_n >= 0.0))
    throw ValidationError("drill force magnitude must be nonnegative");
  if (!drill_direction.finite())
    throw ValidationError("drill direction must be finite");

  SegmentForces f;
  const double m = anthro.body_mass_kg;
  f.upper_arm_weight = {0.0, 0.0,
                        -anthro.coefficients.mass_fraction_upper_arm * m * gravity_m_s2};
  f.forearm_weight = {0.0, 0.0,
                      -anthro.coefficients.mass_fraction_forearm_hand * m * gravity_m_s2};
  f.machine_weight = {0.0, 0.0, -machine_mass_kg * gravity_m_s2};
  f.drill_force = drill_direction * drill_force_n;
  return f;
}

PostureAngles posture_angles(const MarkerFrame& frame) {
  check_frame(frame);

  const Vec3 upper = project_sagittal(frame.elbow - frame.shoulder);
  const Vec3 forearm = project_sagittal(frame.wrist - frame.elbow);
  if (!(upper.norm() > 0.0) || !(forearm.norm() > 0.0))
    throw ValidationError("arm segment has zero length in the sagittal plane");

  const Vec3 down{0.0, 0.0, -1.0};
  PostureAngles angles;
  angles.shoulder_flexion_deg = angle_between_deg(down, upper);
  angles.elbow_flexion_deg = angle_between_deg(upper, forearm);
  return angles;
}

JointMoment joint_moment_from_measured_force(
    const MarkerFrame& frame, double measured_force_n,
    const Vec3& drill_direction, const SegmentForces& forces_at_measurement,
    MomentArmModel model, const SegmentCoefficients& coefficients) {
  if (!(measured_force_n >= 0.0) || !std::isfinite(measured_force_n))
    throw ValidationError("measured force must be finite and nonnegative");
  SegmentForces forces = forces_at_measurement;
  forces.drill_force = drill_direction * measured_force_n;
  return moment_load(frame, forces, model, coefficients);
}

}  // namespace fatiguekit
