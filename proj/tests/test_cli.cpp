// End-to-end checks of the command-line tool: subcommands, exit codes,
// deterministic outputs, flag-over-config precedence.

#include <sys/wait.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "fatiguekit/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<unsigned> counter{0};
    path = fs::temp_directory_path() /
           ("fatiguekit_cli_test_" + std::to_string(++counter));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
  const std::string command =
      std::string(FATIGUEKIT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string q(const fs::path& path) { return "'" + path.string() + "'"; }

}  // namespace

TEST_CASE("cli: simulate then fit then stats") {
  TempDir dir;
  const auto sim = dir.path / "sim";
  const auto out = dir.path / "out";

  REQUIRE(run_cli("simulate --out-dir " + q(sim) + " --cohort-size 12 --write-markers true") == 0);
  CHECK(fs::exists(sim / "subjects.csv"));
  CHECK(fs::exists(sim / "sessions.csv"));
  CHECK(fs::exists(sim / "markers.csv"));
  CHECK(fs::exists(sim / "truth.csv"));

  REQUIRE(run_cli("fit --subjects " + q(sim / "subjects.csv") + " --sessions " +
                  q(sim / "sessions.csv") + " --out-dir " + q(out)) == 0);
  CHECK(fs::exists(out / "fit.csv"));
  CHECK(fs::exists(out / "fit_summary.csv"));

  REQUIRE(run_cli("stats --fit " + q(out / "fit.csv") + " --subjects " +
                  q(sim / "subjects.csv") + " --out-dir " + q(out) +
                  " --group-size 6") == 0);
  CHECK(fs::exists(out / "stats_summary.csv"));
  CHECK(fs::exists(out / "correlation.csv"));
  CHECK(fs::exists(out / "groups.csv"));
  CHECK(fs::exists(out / "hist_r_squared.csv"));
  CHECK(fs::exists(out / "hist_k.csv"));

  SUBCASE("moment subcommand consumes the generated markers") {
    REQUIRE(run_cli("moment --markers " + q(sim / "markers.csv") + " --subjects " +
                    q(sim / "subjects.csv") + " --out-dir " + q(out)) == 0);
    CHECK(fs::exists(out / "moments.csv"));
  }

  SUBCASE("report subcommand produces fit and stats together") {
    const auto rep = dir.path / "rep";
    REQUIRE(run_cli("report --subjects " + q(sim / "subjects.csv") + " --sessions " +
                    q(sim / "sessions.csv") + " --out-dir " + q(rep) +
                    " --group-size 6") == 0);
    CHECK(fs::exists(rep / "fit.csv"));
    CHECK(fs::exists(rep / "stats_summary.csv"));
  }
}

TEST_CASE("cli: fit with markers runs the force-to-moment pipeline") {
  using namespace fatiguekit;
  TempDir dir;

  // Force-space dataset whose measurements derive from a known moment-space
  // truth, written through the library and fitted through the binary.
  RunConfig config;
  config.unit = CapacityUnit::force;

  SubjectRecord rec;
  rec.id = "S01";
  rec.age_yr = 41.0;
  rec.stature_m = 1.712;
  rec.body_mass_kg = 70.2;
  rec.upper_limb_cm = 23.6;
  rec.lower_limb_cm = 25.6;
  rec.unit = CapacityUnit::force;

  const auto anthro = rec.anthropometry(config.coefficients);
  const std::vector<PostureAngles> posture = {{46.4, 50.1}};
  const auto frames =
      generate_marker_trace(anthro, posture, config.marker_rate_hz, config.hand_offset_m);
  MarkerSet markers;
  for (double t_s : config.schedule.times_s) markers.frames[{rec.id, t_s}] = frames;

  const Vec3 drill_dir = config.drill_direction.normalized();
  const auto gravity = segment_forces_from_anthropometry(
      anthro, config.machine_mass_kg, 0.0, config.drill_direction);
  const double gravity_moment = moment_load(frames[0], gravity).flexion_nm;
  const double per_newton =
      joint_moment_from_measured_force(frames[0], 1.0, drill_dir, gravity).flexion_nm -
      gravity_moment;
  const double gamma_max = 90.0;
  const double true_k = 0.8;
  const double gamma_load =
      moment_load(frames[0],
                  segment_forces_from_anthropometry(anthro, config.machine_mass_kg,
                                                    config.load_force_n, drill_dir))
          .flexion_nm;
  const double f_true = gamma_load / gamma_max;
  for (double t_s : config.schedule.times_s) {
    const double t_min = minutes_from_seconds(t_s);
    const double gamma_t = gamma_max * std::exp(-true_k * f_true * t_min);
    const double force = (gamma_t - gravity_moment) / per_newton;
    REQUIRE(force > 0.0);
    if (t_s == 0.0)
      rec.mvc_trials.push_back(force);
    else
      rec.sessions.push_back({t_min, force, CapacityUnit::force});
  }

  const std::vector<SubjectRecord> subjects = {rec};
  write_subjects(dir.path / "subjects.csv", subjects);
  write_sessions(dir.path / "sessions.csv", subjects);
  write_markers(dir.path / "markers.csv", markers);

  const auto out = dir.path / "out";
  REQUIRE(run_cli("fit --unit force --subjects " + q(dir.path / "subjects.csv") +
                  " --sessions " + q(dir.path / "sessions.csv") + " --markers " +
                  q(dir.path / "markers.csv") + " --out-dir " + q(out)) == 0);

  const auto rows = parse_fit_output(out / "fit.csv");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].fit.unit == CapacityUnit::moment);
  CHECK(rows[0].fit.k_hat == doctest::Approx(true_k).epsilon(1e-9));
  CHECK(rows[0].fit.mvc_used == doctest::Approx(gamma_max).epsilon(1e-9));
}

TEST_CASE("cli: identical seed and config give byte-identical datasets") {
  TempDir dir;
  const std::string flags = " --cohort-size 5 --seed 7 --write-markers true";
  REQUIRE(run_cli("simulate --out-dir " + q(dir.path / "a") + flags) == 0);
  REQUIRE(run_cli("simulate --out-dir " + q(dir.path / "b") + flags) == 0);
  for (const char* name : {"subjects.csv", "sessions.csv", "markers.csv", "truth.csv"})
    CHECK(read_file(dir.path / "a" / name) == read_file(dir.path / "b" / name));
}

TEST_CASE("cli: flags override the config file") {
  TempDir dir;
  {
    std::ofstream config(dir.path / "run.toml");
    config << "cohort_size = 3\nseed = 11\nout_dir = " << (dir.path / "from_config")
           << "\n";
  }
  // out_dir from the file, cohort_size overridden on the command line
  REQUIRE(run_cli("simulate --config " + q(dir.path / "run.toml") +
                  " --cohort-size 5") == 0);
  const auto subjects = read_file(dir.path / "from_config" / "subjects.csv");
  std::size_t rows = 0;
  for (char c : subjects)
    if (c == '\n') ++rows;
  CHECK(rows == 6);  // header + five subjects
}

TEST_CASE("cli: exit codes") {
  TempDir dir;

  SUBCASE("missing input file is a validation error") {
    CHECK(run_cli("fit --subjects missing.csv --sessions missing.csv --out-dir " +
                  q(dir.path / "x")) == 1);
  }

  SUBCASE("unknown flag is a usage error") {
    CHECK(run_cli("simulate --definitely-not-a-flag 1") == 1);
  }

  SUBCASE("unparseable cohort produces a nonzero exit") {
    std::ofstream(dir.path / "subjects.csv") << "id,bogus\n";
    CHECK(run_cli("fit --subjects " + q(dir.path / "subjects.csv") +
                  " --sessions " + q(dir.path / "subjects.csv") + " --out-dir " +
                  q(dir.path / "x")) == 1);
  }

  SUBCASE("cohort where nothing can be fitted is a degeneracy") {
    std::ofstream(dir.path / "subjects.csv")
        << "id,age_yr,stature_m,mass_kg,upper_limb_cm,lower_limb_cm\n"
           "S01,41,1.712,70.2,23.6,25.6\n";
    std::ofstream(dir.path / "sessions.csv")
        << "subject_id,session_time_s,measured_force_N\n"
           "S01,0,100\n";  // MVC only, no fatiguing sessions
    CHECK(run_cli("fit --subjects " + q(dir.path / "subjects.csv") + " --sessions " +
                  q(dir.path / "sessions.csv") + " --out-dir " +
                  q(dir.path / "x") + " --unit force") == 2);
  }

  SUBCASE("help is not an error") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("simulate --help") == 0);
  }

  SUBCASE("no subcommand is a usage error") { CHECK(run_cli("") == 1); }
}
