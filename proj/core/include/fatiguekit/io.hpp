#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fatiguekit/biomech.hpp"
#include "fatiguekit/estimation.hpp"
#include "fatiguekit/stats.hpp"
#include "fatiguekit/subject.hpp"
#include "fatiguekit/synth.hpp"
#include "fatiguekit/units.hpp"
#include "fatiguekit/vec3.hpp"

namespace fatiguekit {

/// Everything a batch run needs. Field defaults are the documented task
/// defaults; a flat key = value config file and CLI flags can override any of
/// them (flags win).
struct RunConfig {
  CapacityUnit unit = CapacityUnit::moment;
  std::uint64_t seed = 42;
  std::string out_dir = "out";

  // simulate
  std::size_t cohort_size = 40;
  double k_mean = 1.02;
  double k_sd = 0.49;
  double strength_mean = 45.1;
  double strength_sd = 7.4;
  double mvc_mean_n = 103.0;  // force-space cohorts
  double mvc_sd_n = 17.0;
  double coupling = 0.6;
  double noise_sigma = 0.03;
  double quantize_step = 0.0;  // simulated instrument readout step; 0 = off
  ProtocolSchedule schedule = ProtocolSchedule::standard();
  bool write_markers = false;

  // task loads
  double load_moment_nm = 10.96;  // task moment demand; mean relative load ~24%
  double load_force_n = 25.0;     // drilling force
  double machine_mass_kg = 2.5;
  Vec3 drill_direction = default_drill_direction();

  // biomech
  SegmentCoefficients coefficients = SegmentCoefficients::defaults();
  MomentArmModel arm_model = MomentArmModel::segment_midpoints;
  double hand_offset_m = 0.15;
  double marker_rate_hz = 30.0;

  // estimation / stats
  QualityBands bands;
  TTestVariant ttest = TTestVariant::welch;
  std::size_t group_size = 10;
  double hist_r2_bin_width = 0.05;
  double hist_k_bin_width = 0.25;
  double hist_k_max = 3.0;

  /// Reaction of pushing perpendicular to the beam (inclined 14.5 degrees),
  /// pointing down and slightly forward onto the limb.
  static Vec3 default_drill_direction();

  double external_load() const {
    return unit == CapacityUnit::moment ? load_moment_nm : load_force_n;
  }

  void validate() const;

  /// Canonical key = value serialization (sorted keys), used for the config
  /// hash embedded in reports.
  std::string serialize() const;

  /// FNV-1a over serialize(); the hash line itself is not hashed.
  std::uint64_t config_hash() const;
};

/// Applies `key = value` pairs from a flat config file. Unknown keys are
/// rejected, naming the key.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);
void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value, const std::string& context);

// ---------------------------------------------------------------------------
// Dataset files
//
//   subjects.csv  id,age_yr,stature_m,mass_kg,upper_limb_cm,lower_limb_cm
//   sessions.csv  subject_id,session_time_s,measured_force_N
//                 (t = 0 rows are MVC trials; several allowed, max is taken)
//   markers.csv   subject_id,session_time_s,frame_time_s,sx,sy,sz,ex,ey,ez,
//                 wx,wy,wz,dx,dy,dz                               (metres)
// ---------------------------------------------------------------------------

std::vector<SubjectRecord> parse_subjects(const std::filesystem::path& path);

/// Attaches sessions.csv rows to their subjects. Values are tagged with
/// `unit`; duplicate nonzero session times are rejected naming the duplicate.
void attach_sessions(std::vector<SubjectRecord>& subjects,
                     const std::filesystem::path& path, CapacityUnit unit);

/// Marker frames grouped by (subject id, session time in seconds).
struct MarkerSet {
  std::map<std::pair<std::string, double>, std::vector<MarkerFrame>> frames;

  const std::vector<MarkerFrame>* find(const std::string& subject_id,
                                       double session_time_s) const;
  /// Coordinate-wise mean of a session's frames.
  static MarkerFrame mean_frame(std::span<const MarkerFrame> frames);
};

MarkerSet parse_markers(const std::filesystem::path& path);

void write_subjects(const std::filesystem::path& path,
                    std::span<const SubjectRecord> subjects);
void write_sessions(const std::filesystem::path& path,
                    std::span<const SubjectRecord> subjects);
void write_markers(const std::filesystem::path& path, const MarkerSet& markers);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace fatiguekit
