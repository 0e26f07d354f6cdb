#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fatiguekit/biomech.hpp"
#include "fatiguekit/estimation.hpp"
#include "fatiguekit/subject.hpp"
#include "fatiguekit/units.hpp"

namespace fatiguekit {

/// Ground truth for one synthetic subject. Identical specs (including seed)
/// reproduce identical datasets bit for bit.
struct SyntheticSubjectSpec {
  double true_k = 1.0;           // min^-1
  double true_capacity = 100.0;  // N or Nm per `unit`
  CapacityUnit unit = CapacityUnit::moment;
  double f_mvc = 0.25;
  double noise_sigma = 0.0;  // multiplicative log-normal sigma, median 1
  double quantize_step = 0.0;  // instrument readout step (e.g. 1 N); 0 = off
  std::uint64_t rng_seed = 0;
};

/// Measurement times in seconds. The t = 0 entry is the MVC session.
struct ProtocolSchedule {
  std::vector<double> times_s;

  /// MVC at t = 0 plus nine fatiguing sessions at fixed intervals.
  static ProtocolSchedule standard() {
    return {{0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0, 120.0, 150.0, 180.0}};
  }

  void validate() const;
};

/// Samples the static decay law at the schedule:
///   value_i = capacity * exp(-k * f * t_i) * exp(sigma * z_i)
/// The t = 0 entry is capacity * noise_0 and plays the MVC role.
std::vector<SessionMeasurement> generate_sessions(const SyntheticSubjectSpec& spec,
                                                  const ProtocolSchedule& schedule);

struct CohortSpec {
  std::size_t n = 40;
  double k_mean = 1.02;         // min^-1
  double k_sd = 0.49;
  double strength_mean = 45.1;  // capacity units
  double strength_sd = 7.4;
  double coupling = 0.6;        // Gaussian-copula correlation between strength and k
  double noise_sigma = 0.03;
  double quantize_step = 0.0;    // instrument readout step; 0 = off
  double external_load = 10.96;  // fixed task load, same unit as strengths
  CapacityUnit unit = CapacityUnit::moment;
  std::uint64_t seed = 42;
  ProtocolSchedule schedule = ProtocolSchedule::standard();

  void validate() const;
};

/// A generated subject together with its generating truth.
struct SyntheticSubject {
  SubjectRecord record;
  double true_k = 0.0;
  double true_capacity = 0.0;
  double f_mvc = 0.0;
};

/// Draws a cohort with the requested strength and fatigue-rate marginals
/// (normal, truncated positive) and Gaussian-copula coupling between them.
/// Per-subject relative load is external_load / strength, so stronger
/// subjects work at lower relative loads. Subject streams derive from
/// seed XOR index; anthropometry is sampled independently of k.
std::vector<SyntheticSubject> generate_cohort(const CohortSpec& spec);

/// Sagittal-plane forward kinematics: builds marker frames whose
/// posture_angles() reproduce the input trajectory exactly. The drill contact
/// point sits `hand_offset_m` beyond the wrist along the forearm line.
std::vector<MarkerFrame> generate_marker_trace(const Anthropometry& anthro,
                                               std::span<const PostureAngles> trajectory,
                                               double sample_rate_hz,
                                               double hand_offset_m = 0.15);

/// Mean drilling posture drift over the ten protocol sessions (shoulder
/// flexion decreasing, elbow flexion increasing as the arm pulls in toward
/// the trunk). Used as the default synthetic posture trajectory.
std::span<const PostureAngles> reference_posture_drift();

}  // namespace fatiguekit
