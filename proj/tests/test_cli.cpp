// End-to-end checks of the command-line tool: spawns the built binary with
// small configs and inspects exit codes and CSV outputs.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "cldp/config.hpp"
#include "cldp/csv.hpp"
#include "cldp/driver.hpp"
#include "cldp/rate.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = CLDP_CLI_PATH;
const fs::path kScratch = CLDP_TEST_TMPDIR;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = kScratch / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(std::move(fields));
  }
  return rows;
}

const std::string kTemporalModel = R"(seed = 11
[model]
type = temporal
nu = 1.0
mu = 0.5
kernel = exponential
beta = 1.0
)";

}  // namespace

TEST_CASE("simulate: exit code, header exactness, row count, determinism") {
  const auto dir = scratch_dir("simulate");
  const auto cfg = dir / "config.toml";
  write_file(cfg, kTemporalModel + R"([experiment]
t = 50.0
[output]
dir = )" + (dir / "out").string() + "\n");

  REQUIRE(run_cli("simulate --config " + cfg.string()) == 0);
  const std::string csv = read_file(dir / "out" / "events.csv");
  const auto rows = parse_csv(csv);
  REQUIRE(!rows.empty());
  CHECK(rows[0] == std::vector<std::string>{"cluster_id", "generation", "time"});
  CHECK(rows.size() > 10);

  // rerun into a second directory: byte-identical dump
  REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " +
                  (dir / "out2").string()) == 0);
  CHECK(read_file(dir / "out2" / "events.csv") == csv);

  // a different seed changes the realization
  REQUIRE(run_cli("simulate --config " + cfg.string() + " --seed 12 --out " +
                  (dir / "out3").string()) == 0);
  CHECK(read_file(dir / "out3" / "events.csv") != csv);
}

TEST_CASE("simulate: spatial dump carries one coordinate column per axis") {
  const auto dir = scratch_dir("simulate_spatial");
  const auto cfg = dir / "config.toml";
  write_file(cfg, R"(seed = 3
[model]
type = spatial
d = 2
nu = 0.3
mu = 0.4
kernel = gaussian
sigma = 0.25
[experiment]
r = 6.0
[output]
dir = )" + (dir / "out").string() + "\n");
  REQUIRE(run_cli("simulate --config " + cfg.string()) == 0);
  const auto rows = parse_csv(read_file(dir / "out" / "events.csv"));
  REQUIRE(!rows.empty());
  CHECK(rows[0] ==
        std::vector<std::string>{"cluster_id", "generation", "x_1", "x_2"});
}

TEST_CASE("bad configuration exits with code 2") {
  const auto dir = scratch_dir("bad_config");
  const auto cfg = dir / "config.toml";
  write_file(cfg, kTemporalModel + R"([experiment]
t = 50.0
surprise_key = 1
[output]
dir = )" + (dir / "out").string() + "\n");
  CHECK(run_cli("simulate --config " + cfg.string()) == 2);
  CHECK(run_cli("simulate --config " + (dir / "nonexistent.toml").string()) ==
        2);

  write_file(cfg, R"(seed = 1
[model]
type = temporal
nu = 1.0
mu = 1.7
kernel = exponential
beta = 1.0
[experiment]
t = 10.0
[output]
dir = )" + (dir / "out").string() + "\n");
  CHECK(run_cli("simulate --config " + cfg.string()) == 2);
}

TEST_CASE("cluster cap aborts with exit code 3") {
  const auto dir = scratch_dir("cap");
  const auto cfg = dir / "config.toml";
  write_file(cfg, R"(seed = 5
[model]
type = temporal
nu = 1.0
mu = 0.95
kernel = exponential
beta = 1.0
cluster_cap = 40
[experiment]
t = 200.0
margin = 1.0
[output]
dir = )" + (dir / "out").string() + "\n");
  CHECK(run_cli("simulate --config " + cfg.string()) == 3);
}

TEST_CASE("ratefn table: zero at the mean, nu at zero, dual routes agree") {
  const auto dir = scratch_dir("ratefn");
  const auto cfg = dir / "config.toml";
  write_file(cfg, kTemporalModel + R"([experiment]
x_min = 0.0
x_max = 4.0
x_points = 9
theta_min = -1.0
theta_max = 0.19
theta_points = 5
[output]
dir = )" + (dir / "out").string() + "\n");
  REQUIRE(run_cli("ratefn --config " + cfg.string()) == 0);
  const auto rows = parse_csv(read_file(dir / "out" / "ratefn.csv"));
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == std::vector<std::string>{"x", "rate_numeric",
                                            "rate_closed_form", "theta_x"});
  // x = 0 row: rate exactly nu, no tilt
  CHECK(std::strtod(rows[1][1].c_str(), nullptr) == 1.0);
  CHECK(rows[1][3].empty());
  // x = 2 row (the mean): rate 0 within 1e-10, both routes
  const double at_mean = std::strtod(rows[5][1].c_str(), nullptr);
  CHECK(std::abs(at_mean) < 1e-10);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double numeric = std::strtod(rows[i][1].c_str(), nullptr);
    const double closed = std::strtod(rows[i][2].c_str(), nullptr);
    CHECK(std::abs(numeric - closed) < 1e-8);
  }
  const auto lambda_rows = parse_csv(read_file(dir / "out" / "lambda.csv"));
  REQUIRE(lambda_rows.size() == 6);
  CHECK(lambda_rows[0] == std::vector<std::string>{"theta", "lambda"});
}

TEST_CASE("verify scalar: schema, zero-hit slopes empty, target column") {
  const auto dir = scratch_dir("verify_scalar");
  const auto cfg = dir / "config.toml";
  write_file(cfg, kTemporalModel + R"([experiment]
a = 40.0
side = ge
scales = 5,10
n_reps = 40
[output]
dir = )" + (dir / "out").string() + "\n");
  REQUIRE(run_cli("verify scalar --config " + cfg.string()) == 0);
  const auto rows = parse_csv(read_file(dir / "out" / "verify_scalar.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{
                       "scale", "n_reps", "n_hits", "p_hat", "ci_lo", "ci_hi",
                       "slope", "slope_ci_lo", "slope_ci_hi", "target"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 10);
    CHECK(rows[i][2] == "0");   // no hits at this event size
    CHECK(rows[i][6].empty());  // slope fields stay empty
    CHECK(rows[i][7].empty());
    CHECK(rows[i][8].empty());
    const double target = std::strtod(rows[i][9].c_str(), nullptr);
    CHECK(target ==
          doctest::Approx(cldp::hawkes_rate(1.0, 0.5, 40.0)).epsilon(1e-12));
  }
}

TEST_CASE("verify subcommands run end to end at smoke sizes") {
  const auto dir = scratch_dir("verify_smoke");

  const auto path_cfg = dir / "path.toml";
  write_file(path_cfg, kTemporalModel + R"([experiment]
t1 = 0.5
t2 = 1.0
rect = 1.4,1.8,2.8,3.6
alphas = 10,20
n_reps = 200
[output]
dir = )" + (dir / "path_out").string() + "\n");
  CHECK(run_cli("verify path --config " + path_cfg.string()) == 0);
  CHECK(fs::exists(dir / "path_out" / "verify_path.csv"));

  const auto spatial_cfg = dir / "spatial.toml";
  write_file(spatial_cfg, R"(seed = 21
[model]
type = spatial
d = 2
nu = 1.0
mu = 0.5
kernel = gaussian
sigma = 0.2
[experiment]
a = 3.0
side = ge
radii = 1.0,1.5
n_reps = 200
[output]
dir = )" + (dir / "spatial_out").string() + "\n");
  CHECK(run_cli("verify spatial --config " + spatial_cfg.string()) == 0);
  CHECK(fs::exists(dir / "spatial_out" / "verify_spatial.csv"));

  const auto void_cfg = dir / "void.toml";
  write_file(void_cfg, R"(seed = 22
[model]
type = spatial
d = 2
nu = 0.15
mu = 0.5
kernel = gaussian
sigma = 0.2
[experiment]
radii = 1.0,2.0
n_reps = 500
[output]
dir = )" + (dir / "void_out").string() + "\n");
  CHECK(run_cli("verify void --config " + void_cfg.string()) == 0);
  CHECK(fs::exists(dir / "void_out" / "verify_void.csv"));
  CHECK(fs::exists(dir / "void_out" / "verify_void_empty_space.csv"));

  const auto oracle_cfg = dir / "oracle.toml";
  write_file(oracle_cfg, kTemporalModel + R"([experiment]
t_scales = 10,20
a = 3.0
n_reps = 2000
[output]
dir = )" + (dir / "oracle_out").string() + "\n");
  CHECK(run_cli("verify oracle --config " + oracle_cfg.string()) == 0);
  const auto tilted =
      parse_csv(read_file(dir / "oracle_out" / "oracle_tilted.csv"));
  const auto panjer =
      parse_csv(read_file(dir / "oracle_out" / "oracle_panjer.csv"));
  REQUIRE(tilted.size() == 3);
  REQUIRE(panjer.size() == 3);
  // the tilted target column equals the exact-oracle target column
  CHECK(tilted[1][9] == panjer[1][3]);
}

TEST_CASE("effective config echo re-parses to the configuration used") {
  const auto dir = scratch_dir("echo");
  const auto cfg = dir / "config.toml";
  write_file(cfg, kTemporalModel + R"([experiment]
t = 20.0
[output]
dir = )" + (dir / "out").string() + "\n");
  REQUIRE(run_cli("simulate --config " + cfg.string() + " --seed 123") == 0);
  const auto echoed =
      cldp::parse_config_file((dir / "out" / "effective_config.toml").string());
  CHECK(echoed.seed == 123);  // the override is recorded
  CHECK(echoed.model.at("mu") == "0.5");
  const auto original = cldp::parse_config_file(cfg.string());
  auto expected = original;
  expected.seed = 123;
  CHECK(echoed == expected);
}

TEST_CASE("thread count does not change outputs") {
  const auto dir = scratch_dir("threads");
  const auto cfg = dir / "config.toml";
  write_file(cfg, kTemporalModel + R"([experiment]
a = 3.0
side = ge
scales = 5,10
n_reps = 2000
[output]
dir = )" + (dir / "out1").string() + "\n");
  REQUIRE(run_cli("verify scalar --config " + cfg.string() +
                  " --threads 1") == 0);
  REQUIRE(run_cli("verify scalar --config " + cfg.string() + " --threads 3 " +
                  "--out " + (dir / "out2").string()) == 0);
  CHECK(read_file(dir / "out1" / "verify_scalar.csv") ==
        read_file(dir / "out2" / "verify_scalar.csv"));
}
