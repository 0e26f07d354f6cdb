#pragma once

#include "fatiguekit/errors.hpp"
#include "fatiguekit/units.hpp"
#include "fatiguekit/vec3.hpp"

namespace fatiguekit {

/// Simultaneous marker positions (metres) for one capture frame. The frame
/// convention is x forward, z up; the sagittal plane is x-z.
struct MarkerFrame {
  Vec3 shoulder;
  Vec3 elbow;
  Vec3 wrist;
  Vec3 drill;  // contact point between tool and work piece
  double time_s = 0.0;
};

/// Forces acting on the limb (N). Gravity vectors point along -z.
struct SegmentForces {
  Vec3 upper_arm_weight;
  Vec3 forearm_weight;  // forearm plus hand
  Vec3 machine_weight;
  Vec3 drill_force;
};

/// Segment mass and centre-of-mass coefficients. The values are not part of
/// the model itself; they come from anthropometry tables and are meant to be
/// overridable per study.
struct SegmentCoefficients {
  double mass_fraction_upper_arm = 0.0;    // fraction of body mass
  double mass_fraction_forearm_hand = 0.0;
  double com_fraction_upper_arm = 0.0;     // from proximal joint, fraction of segment length
  double com_fraction_forearm = 0.0;

  static SegmentCoefficients defaults() {
    return {0.028, 0.022, 0.436, 0.430};
  }

  void validate() const;
};

struct Anthropometry {
  double body_mass_kg = 0.0;
  double stature_m = 0.0;
  double upper_arm_length_m = 0.0;
  double forearm_length_m = 0.0;
  SegmentCoefficients coefficients = SegmentCoefficients::defaults();

  void validate() const;
};

/// Sagittal-plane flexion angles, degrees, normalized to [0, 180]. Shoulder
/// flexion is measured from the downward vertical to the upper arm; elbow
/// flexion between the upper-arm extension and the forearm.
struct PostureAngles {
  double shoulder_flexion_deg = 0.0;
  double elbow_flexion_deg = 0.0;
};

/// Where segment weights are applied when taking moments: at segment
/// midpoints, or at anthropometric centre-of-mass fractions.
enum class MomentArmModel { segment_midpoints, com_fractions };

/// Shoulder moment decomposition. `flexion_nm` is the signed component about
/// the sagittal-plane flexion axis, computed after projecting markers and
/// forces onto the sagittal plane; `out_of_plane_nm` is the magnitude of the
/// discarded off-axis torque of the full 3D moment.
struct JointMoment {
  Vec3 torque;
  double flexion_nm = 0.0;
  double out_of_plane_nm = 0.0;
};

/// Moment of the external loads about the shoulder: upper-arm weight at the
/// upper-arm load point, forearm weight at the elbow-wrist midpoint, machine
/// weight at the wrist-drill midpoint, drill force at the contact point.
JointMoment moment_load(const MarkerFrame& frame, const SegmentForces& forces,
                        MomentArmModel model = MomentArmModel::segment_midpoints,
                        const SegmentCoefficients& coefficients =
                            SegmentCoefficients::defaults());

/// Builds the gravity and drill-force vectors from anthropometry. Weights act
/// along -z with g = 9.81; the drill force is magnitude * direction.
SegmentForces segment_forces_from_anthropometry(const Anthropometry& anthro,
                                                double machine_mass_kg,
                                                double drill_force_n,
                                                const Vec3& drill_direction);

PostureAngles posture_angles(const MarkerFrame& frame);

/// Shoulder moment implied by a measured maximal force in the drilling
/// direction: the load moment with the drill-force term replaced by the
/// measured force. Converts strength measurements into joint-moment space.
JointMoment joint_moment_from_measured_force(
    const MarkerFrame& frame, double measured_force_n,
    const Vec3& drill_direction, const SegmentForces& forces_at_measurement,
    MomentArmModel model = MomentArmModel::segment_midpoints,
    const SegmentCoefficients& coefficients = SegmentCoefficients::defaults());

}  // namespace fatiguekit
