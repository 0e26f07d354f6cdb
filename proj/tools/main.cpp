// Batch CLI for the fatigue-rate toolkit: synthetic dataset generation,
// per-subject fatigue-rate fitting, cohort statistics, and joint-moment
// computation from marker data.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fatiguekit/io.hpp"
#include "fatiguekit/pipeline.hpp"

namespace {

using fatiguekit::RunConfig;

/// One --flag per config key, applied after the config file so that flags
/// always win.
struct ConfigBinding {
  CLI::Option* option = nullptr;
  std::string key;
  std::string value;
};

struct CommandContext {
  std::string config_path;
  std::vector<ConfigBinding> bindings;
};

void attach_config_options(CLI::App* cmd, CommandContext& ctx) {
  cmd->add_option("--config", ctx.config_path,
                  "Flat key = value config file; flags override its entries");

  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"unit", "Capacity space: 'moment' or 'force'"},
      {"seed", "RNG seed for synthetic data"},
      {"out_dir", "Output directory"},
      {"cohort_size", "Number of synthetic subjects"},
      {"k_mean", "Fatigue-rate mean, 1/min"},
      {"k_sd", "Fatigue-rate SD, 1/min"},
      {"strength_mean", "Joint-moment strength mean, Nm"},
      {"strength_sd", "Joint-moment strength SD, Nm"},
      {"mvc_mean_n", "MVC force mean for force-space cohorts, N"},
      {"mvc_sd_n", "MVC force SD for force-space cohorts, N"},
      {"coupling", "Strength/fatigue-rate copula correlation, [-1, 1]"},
      {"noise_sigma", "Multiplicative measurement noise sigma"},
      {"quantize_step", "Simulated instrument readout step (0 = off)"},
      {"schedule_s", "Comma-separated session times in seconds"},
      {"write_markers", "Also generate marker traces (true/false)"},
      {"load_moment_nm", "Task moment demand, Nm"},
      {"load_force_n", "Drilling force, N"},
      {"machine_mass_kg", "Tool mass, kg"},
      {"drill_dir_x", "Drill force direction, x"},
      {"drill_dir_y", "Drill force direction, y"},
      {"drill_dir_z", "Drill force direction, z"},
      {"mass_fraction_upper_arm", "Upper-arm mass as fraction of body mass"},
      {"mass_fraction_forearm_hand", "Forearm+hand mass fraction"},
      {"com_fraction_upper_arm", "Upper-arm CoM position along the segment"},
      {"com_fraction_forearm", "Forearm CoM position along the segment"},
      {"arm_model", "Weight application points: 'midpoints' or 'com'"},
      {"hand_offset_m", "Drill contact point beyond the wrist, m"},
      {"marker_rate_hz", "Marker trace sample rate, Hz"},
      {"r2_good", "R-squared threshold for a good fit"},
      {"r2_fair", "R-squared threshold for a fair fit"},
      {"ttest", "Primary t-test variant: 'welch' or 'pooled'"},
      {"group_size", "Strength-split group size"},
      {"hist_r2_bin_width", "R-squared histogram bin width"},
      {"hist_k_bin_width", "Fatigue-rate histogram bin width"},
      {"hist_k_max", "Fatigue-rate histogram upper edge"},
  };

  ctx.bindings.reserve(keys.size());
  for (const auto& [key, help] : keys) {
    auto& binding = ctx.bindings.emplace_back();
    binding.key = key;
    std::string flag = "--" + key;
    for (auto& c : flag)
      if (c == '_') c = '-';
    binding.option = cmd->add_option(flag, binding.value, help);
  }
}

RunConfig resolve_config(const CommandContext& ctx) {
  RunConfig config;
  if (!ctx.config_path.empty())
    fatiguekit::apply_config_file(config, ctx.config_path);
  for (const auto& binding : ctx.bindings)
    if (binding.option->count() > 0)
      fatiguekit::apply_config_entry(config, binding.key, binding.value,
                                     "command line");
  config.validate();
  return config;
}

void print_hash(const RunConfig& config) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config.config_hash()));
  std::cout << "config hash: " << hash << '\n';
}

void print_summary_line(const char* item, const fatiguekit::Summary& s) {
  std::printf("  %-24s mean %8.3f  sd %7.3f  min %8.3f  max %8.3f  (n=%zu)\n",
              item, s.mean, s.sd, s.min, s.max, s.n);
}

void print_fit_summary(const fatiguekit::FitReport& report) {
  std::vector<double> ks, strengths, r2s;
  std::size_t good = 0;
  for (const auto& row : report.rows) {
    if (!row.ok) continue;
    ks.push_back(row.fit.k_hat);
    strengths.push_back(row.fit.mvc_used);
    if (row.fit.r_squared) r2s.push_back(*row.fit.r_squared);
    if (row.fit.quality == fatiguekit::FitQuality::good) ++good;
  }
  std::cout << "fitted " << report.n_fitted << " subject(s), skipped "
            << report.n_skipped << '\n';
  if (ks.empty()) return;
  print_summary_line("strength", fatiguekit::summarize(strengths));
  print_summary_line("fatigue rate k", fatiguekit::summarize(ks));
  if (!r2s.empty()) print_summary_line("R^2", fatiguekit::summarize(r2s));
  std::cout << "  good fits (R^2 band):    " << good << " / " << report.n_fitted
            << '\n';
}

void print_stats(const fatiguekit::StatsReport& stats) {
  print_summary_line("strength", stats.strength_all);
  print_summary_line("fatigue rate k", stats.k_all);
  if (stats.r2_all.n > 0) print_summary_line("R^2", stats.r2_all);
  if (stats.primary) {
    const auto& t = *stats.primary;
    std::printf("  %s t-test (high vs low strength): t=%.3f df=%.2f p=%.5f\n",
                to_string(t.variant), t.t_statistic, t.df, t.p_value);
  }
}

int run_simulate(const CommandContext& ctx) {
  const RunConfig config = resolve_config(ctx);
  print_hash(config);
  const auto dataset = fatiguekit::simulate_dataset(config);
  fatiguekit::write_dataset(config.out_dir, dataset, config);
  std::cout << "wrote " << dataset.subjects.size() << " subjects to "
            << config.out_dir << '\n';
  return 0;
}

int run_fit_command(const CommandContext& ctx, const std::string& subjects_path,
                    const std::string& sessions_path, const std::string& markers_path,
                    bool with_stats) {
  const RunConfig config = resolve_config(ctx);
  print_hash(config);

  auto subjects = fatiguekit::parse_subjects(subjects_path);
  fatiguekit::attach_sessions(subjects, sessions_path, config.unit);

  fatiguekit::MarkerSet markers;
  const bool have_markers = !markers_path.empty();
  if (have_markers) markers = fatiguekit::parse_markers(markers_path);

  const auto report =
      fatiguekit::run_fit(subjects, config, have_markers ? &markers : nullptr);
  fatiguekit::write_fit_report(config.out_dir, report, config);
  print_fit_summary(report);
  for (const auto& row : report.rows)
    if (!row.ok)
      std::cerr << "skipped " << row.id << ": " << row.error << '\n';

  if (report.n_fitted == 0)
    throw fatiguekit::DegeneracyError("no subject could be fitted");

  if (with_stats) {
    const auto table = fatiguekit::build_cohort_table(report.rows, subjects);
    const auto stats = fatiguekit::run_stats(table, config);
    fatiguekit::write_stats_report(config.out_dir, stats, config);
    print_stats(stats);
  }
  std::cout << "reports written to " << config.out_dir << '\n';
  return 0;
}

int run_stats_command(const CommandContext& ctx, const std::string& fit_path,
                      const std::string& subjects_path) {
  const RunConfig config = resolve_config(ctx);
  print_hash(config);

  const auto rows = fatiguekit::parse_fit_output(fit_path);
  const auto subjects = fatiguekit::parse_subjects(subjects_path);
  const auto table = fatiguekit::build_cohort_table(rows, subjects);
  const auto stats = fatiguekit::run_stats(table, config);
  fatiguekit::write_stats_report(config.out_dir, stats, config);
  print_stats(stats);
  std::cout << "reports written to " << config.out_dir << '\n';
  return 0;
}

int run_moment_command(const CommandContext& ctx, const std::string& markers_path,
                       const std::string& subjects_path) {
  const RunConfig config = resolve_config(ctx);
  print_hash(config);

  const auto markers = fatiguekit::parse_markers(markers_path);
  const auto subjects = fatiguekit::parse_subjects(subjects_path);
  const auto rows = fatiguekit::run_moment(markers, subjects, config);
  fatiguekit::write_moment_report(config.out_dir, rows, config);
  std::cout << "wrote " << rows.size() << " moment rows to " << config.out_dir
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subject-specific muscle fatigue-rate estimation toolkit"};
  app.require_subcommand(1);

  CommandContext simulate_ctx, fit_ctx, stats_ctx, moment_ctx, report_ctx;
  std::string fit_subjects, fit_sessions, fit_markers;
  std::string stats_fit, stats_subjects;
  std::string moment_markers, moment_subjects;
  std::string report_subjects, report_sessions, report_markers;

  auto* simulate = app.add_subcommand(
      "simulate", "Generate a synthetic dataset with known ground truth");
  attach_config_options(simulate, simulate_ctx);

  auto* fit = app.add_subcommand(
      "fit", "Estimate per-subject fatigue rates from session data");
  fit->add_option("--subjects", fit_subjects, "subjects.csv")->required();
  fit->add_option("--sessions", fit_sessions, "sessions.csv")->required();
  fit->add_option("--markers", fit_markers,
                  "markers.csv; converts force measurements to joint moments");
  attach_config_options(fit, fit_ctx);

  auto* stats = app.add_subcommand(
      "stats", "Cohort statistics and histograms from a fit report");
  stats->add_option("--fit", stats_fit, "fit.csv from a previous fit run")->required();
  stats->add_option("--subjects", stats_subjects, "subjects.csv")->required();
  attach_config_options(stats, stats_ctx);

  auto* moment = app.add_subcommand(
      "moment", "Per-frame joint moments and posture angles from marker data");
  moment->add_option("--markers", moment_markers, "markers.csv")->required();
  moment->add_option("--subjects", moment_subjects, "subjects.csv")->required();
  attach_config_options(moment, moment_ctx);

  auto* report = app.add_subcommand(
      "report", "Fit plus statistics in one run");
  report->add_option("--subjects", report_subjects, "subjects.csv")->required();
  report->add_option("--sessions", report_sessions, "sessions.csv")->required();
  report->add_option("--markers", report_markers, "markers.csv");
  attach_config_options(report, report_ctx);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (simulate->parsed()) return run_simulate(simulate_ctx);
    if (fit->parsed())
      return run_fit_command(fit_ctx, fit_subjects, fit_sessions, fit_markers, false);
    if (stats->parsed()) return run_stats_command(stats_ctx, stats_fit, stats_subjects);
    if (moment->parsed())
      return run_moment_command(moment_ctx, moment_markers, moment_subjects);
    if (report->parsed())
      return run_fit_command(report_ctx, report_subjects, report_sessions,
                             report_markers, true);
  } catch (const fatiguekit::DegeneracyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const fatiguekit::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
