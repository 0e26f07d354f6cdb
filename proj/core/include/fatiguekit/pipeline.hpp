#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fatiguekit/io.hpp"
#include "fatiguekit/stats.hpp"
#include "fatiguekit/subject.hpp"
#include "fatiguekit/synth.hpp"

namespace fatiguekit {

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulatedDataset {
  std::vector<SubjectRecord> subjects;
  std::vector<SyntheticSubject> truth;
  MarkerSet markers;  // empty unless requested
};

/// Draws a synthetic cohort per the config. Moment-space cohorts use the
/// strength anchors; force-space cohorts use the MVC force anchors. Marker
/// traces (one per session, posture from the reference drift scaled by each
/// subject's limb lengths) are attached when config.write_markers is set.
SimulatedDataset simulate_dataset(const RunConfig& config);

/// Writes subjects.csv, sessions.csv, truth.csv and (if present) markers.csv.
void write_dataset(const std::filesystem::path& dir, const SimulatedDataset& dataset,
                   const RunConfig& config);

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct SubjectFitRow {
  std::string id;
  bool ok = false;
  std::string error;  // set when the subject was skipped
  FitResult fit;
};

struct FitReport {
  std::vector<SubjectFitRow> rows;  // ordered by subject id
  std::size_t n_fitted = 0;
  std::size_t n_skipped = 0;
};

/// Converts a force-space record to joint-moment space using the per-session
/// mean marker frame: measured forces map through the measured-force moment,
/// and the relative load comes from the task moment at the MVC posture.
SubjectRecord to_moment_space(const SubjectRecord& record, const MarkerSet& markers,
                              const RunConfig& config);

/// Fits every subject; per-subject failures are recorded, not fatal.
/// When markers are supplied, force-space records are first converted to
/// moment space (the explicit force-to-moment pipeline stage).
FitReport run_fit(const std::vector<SubjectRecord>& subjects, const RunConfig& config,
                  const MarkerSet* markers = nullptr);

void write_fit_report(const std::filesystem::path& dir, const FitReport& report,
                      const RunConfig& config);

/// Reads the per-subject rows of a previously written fit.csv.
std::vector<SubjectFitRow> parse_fit_output(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

struct Histogram {
  double lo = 0.0;
  double bin_width = 0.0;
  std::vector<std::size_t> counts;
  std::size_t underflow = 0;
  std::size_t overflow = 0;
};

Histogram histogram(std::span<const double> values, double lo, double hi,
                    double bin_width);

struct StatsReport {
  // Cohort summaries over all fitted subjects and over good fits only.
  Summary strength_all, k_all, r2_all;
  std::optional<Summary> k_good;

  CorrelationMatrix correlation{std::vector<std::string>{}};
  std::optional<StrengthSplit> split;        // present when the cohort is large enough
  std::optional<GroupComparison> primary;    // config.ttest variant
  std::optional<GroupComparison> secondary;  // the other variant, as cross-check
  Histogram r2_hist, k_hist;
};

/// Builds the analysis table (fatigue_rate, joint_moment_strength, age, bmi,
/// r_squared) from fit rows and subject anthropometry. Skipped subjects are
/// excluded; missing values are NaN.
CohortTable build_cohort_table(const std::vector<SubjectFitRow>& rows,
                               const std::vector<SubjectRecord>& subjects);

StatsReport run_stats(const CohortTable& table, const RunConfig& config);

void write_stats_report(const std::filesystem::path& dir, const StatsReport& stats,
                        const RunConfig& config);

// ---------------------------------------------------------------------------
// moment
// ---------------------------------------------------------------------------

struct MomentRow {
  std::string subject_id;
  double session_time_s = 0.0;
  double frame_time_s = 0.0;
  JointMoment load_moment;
  PostureAngles posture;
};

/// Per-frame task moment (gravity terms plus the configured drill force) and
/// posture angles for every marker frame, ordered by subject and session.
std::vector<MomentRow> run_moment(const MarkerSet& markers,
                                  const std::vector<SubjectRecord>& subjects,
                                  const RunConfig& config);

void write_moment_report(const std::filesystem::path& dir,
                         const std::vector<MomentRow>& rows, const RunConfig& config);

}  // namespace fatiguekit
