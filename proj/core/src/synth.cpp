#include "fatiguekit/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "fatiguekit/rng.hpp"

namespace fatiguekit {

namespace {

constexpr double deg_to_rad = std::numbers::pi / 180.0;

double truncated_positive_normal(Rng& rng, double mean, double sd) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double v = mean + sd * rng.normal();
    if (v > 0.0) return v;
  }
  throw DegeneracyError("could not draw a positive value from N(" +
                        std::to_string(mean) + ", " + std::to_string(sd) + ")");
}

}  // namespace

void ProtocolSchedule::validate() const {
  if (times_s.empty()) throw ValidationError("schedule must not be empty");
  for (std::size_t i = 0; i < times_s.size(); ++i) {
    if (!(times_s[i] >= 0.0) || !std::isfinite(times_s[i]))
      throw ValidationError("schedule times must be finite and nonnegative");
    if (i > 0 && !(times_s[i] > times_s[i - 1]))
      throw ValidationError("schedule times must be strictly increasing");
  }
}

std::vector<SessionMeasurement> generate_sessions(const SyntheticSubjectSpec& spec,
                                                  const ProtocolSchedule& schedule) {
  schedule.validate();
  if (!(spec.true_k > 0.0)) throw ValidationError("true_k must be positive");
  if (!(spec.true_capacity > 0.0))
    throw ValidationError("true_capacity must be positive");
  if (!(spec.f_mvc > 0.0) || !(spec.f_mvc <= 1.0))
    throw ValidationError("f_mvc must lie in (0, 1]");
  if (!(spec.noise_sigma >= 0.0))
    throw ValidationError("noise_sigma must be nonnegative");
  if (!(spec.quantize_step >= 0.0))
    throw ValidationError("quantize_step must be nonnegative");

  Rng rng(spec.rng_seed);
  std::vector<SessionMeasurement> sessions;
  sessions.reserve(schedule.times_s.size());
  for (double t_s : schedule.times_s) {
    const double t_min = minutes_from_seconds(t_s);
    double value =
        spec.true_capacity * std::exp(-spec.true_k * spec.f_mvc * t_min);
    if (spec.noise_sigma > 0.0)
      value *= std::exp(spec.noise_sigma * rng.normal());
    if (spec.quantize_step > 0.0) {
      // Instrument readout: snap to the step, never below one step so the
      // measurement stays a valid positive strength.
      value = std::max(spec.quantize_step,
                       std::round(value / spec.quantize_step) * spec.quantize_step);
    }
    sessions.push_back({t_min, value, spec.unit});
  }
  return sessions;
}

void CohortSpec::validate() const {
  if (n == 0) throw ValidationError("cohort size must be at least 1");
  if (!(k_mean > 0.0) || !(k_sd >= 0.0))
    throw ValidationError("fatigue-rate distribution must have positive mean and nonnegative sd");
  if (!(strength_mean > 0.0) || !(strength_sd >= 0.0))
    throw ValidationError("strength distribution must have positive mean and nonnegative sd");
  if (!(coupling >= -1.0) || !(coupling <= 1.0))
    throw ValidationError("coupling must lie in [-1, 1]");
  if (!(noise_sigma >= 0.0)) throw ValidationError("noise_sigma must be nonnegative");
  if (!(quantize_step >= 0.0))
    throw ValidationError("quantize_step must be nonnegative");
  if (!(external_load > 0.0)) throw ValidationError("external_load must be positive");
  schedule.validate();
}

std::vector<SyntheticSubject> generate_cohort(const CohortSpec& spec) {
  spec.validate();

  std::vector<SyntheticSubject> cohort;
  cohort.reserve(spec.n);
  const double cross = std::sqrt(1.0 - spec.coupling * spec.coupling);

  for (std::size_t i = 0; i < spec.n; ++i) {
    Rng rng(Rng::derive_stream(spec.seed, i));

    // Gaussian copula: strength and k share the latent z1.
    double strength = 0.0;
    double k = 0.0;
    for (int attempt = 0;; ++attempt) {
      const double z1 = rng.normal();
      const double z2 = spec.coupling * z1 + cross * rng.normal();
      strength = spec.strength_mean + spec.strength_sd * z1;
      k = spec.k_mean + spec.k_sd * z2;
      if (strength > 0.0 && k > 0.0) break;
      if (attempt >= 1000)
        throw DegeneracyError("could not draw positive (strength, k) pair");
    }

    SyntheticSubject subject;
    subject.true_k = k;
    subject.true_capacity = strength;
    subject.f_mvc = std::min(spec.external_load / strength, 1.0);

    auto& rec = subject.record;
    char id[8];
    std::snprintf(id, sizeof id, "S%03zu", i + 1);
    rec.id = id;
    rec.unit = spec.unit;

    // Anthropometry drawn independently of the fatigue truth.
    rec.age_yr = std::round(truncated_positive_normal(rng, 41.2, 11.4));
    rec.stature_m = truncated_positive_normal(rng, 1.712, 0.051);
    rec.body_mass_kg = truncated_positive_normal(rng, 70.2, 10.4);
    rec.upper_limb_cm = truncated_positive_normal(rng, 23.6, 3.0);
    rec.lower_limb_cm = truncated_positive_normal(rng, 25.6, 1.8);
    rec.bmi = rec.computed_bmi();

    SyntheticSubjectSpec subject_spec;
    subject_spec.true_k = k;
    subject_spec.true_capacity = strength;
    subject_spec.unit = spec.unit;
    subject_spec.f_mvc = subject.f_mvc;
    subject_spec.noise_sigma = spec.noise_sigma;
    subject_spec.quantize_step = spec.quantize_step;
    subject_spec.rng_seed = rng.next_u64();

    const auto sessions = generate_sessions(subject_spec, spec.schedule);
    for (const auto& s : sessions) {
      if (s.time_min == 0.0)
        rec.mvc_trials.push_back(s.value);
      else
        rec.sessions.push_back(s);
    }
    cohort.push_back(std::move(subject));
  }
  return cohort;
}

std::vector<MarkerFrame> generate_marker_trace(const Anthropometry& anthro,
                                               std::span<const PostureAngles> trajectory,
                                               double sample_rate_hz,
                                               double hand_offset_m) {
  anthro.validate();
  if (trajectory.empty()) throw ValidationError("posture trajectory must not be empty");
  if (!(sample_rate_hz > 0.0)) throw ValidationError("sample rate must be positive");
  if (!(hand_offset_m > 0.0)) throw ValidationError("hand offset must be positive");

  const Vec3 shoulder{0.0, 0.0, 0.6 * anthro.stature_m};  // seated shoulder height
  std::vector<MarkerFrame> frames;
  frames.reserve(trajectory.size());

  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto& q = trajectory[i];
    if (!(q.shoulder_flexion_deg >= 0.0) || !(q.shoulder_flexion_deg <= 180.0) ||
        !(q.elbow_flexion_deg >= 0.0) || !(q.elbow_flexion_deg <= 180.0))
      throw ValidationError("posture angles must lie in [0, 180] degrees");

    const double q1 = q.shoulder_flexion_deg * deg_to_rad;
    const double q2 = q.elbow_flexion_deg * deg_to_rad;

    // Upper arm: downward vertical rotated forward by q1.
    const Vec3 upper{std::sin(q1), 0.0, -std::cos(q1)};
    // Forearm: the upper-arm direction flexed by a further q2 (hand rises).
    const Vec3 forearm{upper.x * std::cos(q2) - upper.z * std::sin(q2), 0.0,
                       upper.x * std::sin(q2) + upper.z * std::cos(q2)};

    MarkerFrame f;
    f.time_s = static_cast<double>(i) / sample_rate_hz;
    f.shoulder = shoulder;
    f.elbow = shoulder + anthro.upper_arm_length_m * upper;
    f.wrist = f.elbow + anthro.forearm_length_m * forearm;
    f.drill = f.wrist + hand_offset_m * forearm;
    frames.push_back(f);
  }
  return frames;
}

std::span<const PostureAngles> reference_posture_drift() {
  static const std::array<PostureAngles, 10> drift = {{
      {46.4, 50.1},
      {44.5, 53.1},
      {43.6, 55.1},
      {44.2, 55.1},
      {42.8, 57.5},
      {42.1, 59.9},
      {41.9, 59.9},
      {39.7, 64.2},
      {37.5, 66.7},
      {30.5, 75.5},
  }};
  return drift;
}

}  // namespace fatiguekit
