#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kpp/config.hpp"
#include "kpp/errors.hpp"
#include "kpp/runner.hpp"

using namespace kpp;
using namespace kpp::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("kpp_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    fs::path p = dir / "run.cfg";
    std::ofstream out(p);
    out << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string strip_timestamp(std::string text) {
    std::stringstream in(text), out;
    std::string line;
    while (std::getline(in, line))
        if (line.find("generated_at") == std::string::npos) out << line << '\n';
    return out.str();
}

} // namespace

TEST_CASE("config parsing") {
    SUBCASE("round trip of a periodic spec") {
        RunConfig cfg = parse_config_text("field.kind=periodic\n"
                                          "field.period=2\n"
                                          "field.c_table=1,2\n"
                                          "field.d_table=1,1\n"
                                          "field.dprime_table=1,1\n"
                                          "sim.horizon=50\n");
        CHECK(cfg.field.kind == FieldKind::Periodic);
        CHECK(cfg.field.c_table == std::vector<double>{1.0, 2.0});
        CHECK(cfg.sim_horizon == 50.0);
    }
    SUBCASE("unknown keys are rejected by name") {
        CHECK_THROWS_WITH_AS(parse_config_text("field.kind=homogeneous\nfoo.bar=1\n"),
                             doctest::Contains("foo.bar"), config_error);
    }
    SUBCASE("duplicate keys are rejected") {
        CHECK_THROWS_WITH_AS(parse_config_text("sim.horizon=1\nsim.horizon=2\n"),
                             doctest::Contains("duplicate"), config_error);
    }
    SUBCASE("out-of-range overrides are rejected") {
        CHECK_THROWS_AS(parse_config_text("sim.horizon=0\n"), config_error);
        CHECK_THROWS_AS(parse_config_text("sim.fit_fraction=1.5\n"), config_error);
        CHECK_THROWS_AS(parse_config_text("eigen.eps_schedule=0.1,0.2,0.3\n"), config_error);
        CHECK_THROWS_AS(parse_config_text("output.format=xml\n"), config_error);
        CHECK_THROWS_AS(parse_config_text("speed.method=sorcery\n"), config_error);
    }
    SUBCASE("comments and blank lines are fine") {
        RunConfig cfg = parse_config_text("# a comment\n\nfield.kind=homogeneous\n");
        CHECK(cfg.field.kind == FieldKind::Homogeneous);
    }
    SUBCASE("field_from_text only accepts field and nonlinearity keys") {
        CHECK_THROWS_AS(field_from_text("sim.horizon=5\n"), config_error);
        CoefficientField f = field_from_text("field.kind=homogeneous\nfield.c=1.5\n");
        CHECK(f.c(0) == 1.5);
    }
}

TEST_CASE("run_task error paths") {
    fs::path dir = scratch_dir("errors");
    SUBCASE("horizon 0 is a config error (exit 2)") {
        fs::path cfg = write_config(dir, "field.kind=homogeneous\nsim.horizon=0\n");
        RunResult r = run_task("simulate", cfg.string(), (dir / "out").string(), {}, "");
        CHECK(r.exit_code == 2);
        CHECK(r.message.find("sim.horizon") != std::string::npos);
    }
    SUBCASE("missing config file") {
        RunResult r = run_task("speed", (dir / "nope.cfg").string(), dir.string(), {}, "");
        CHECK(r.exit_code == 2);
    }
    SUBCASE("unknown task") {
        fs::path cfg = write_config(dir, "field.kind=homogeneous\n");
        RunResult r = run_task("meditate", cfg.string(), dir.string(), {}, "");
        CHECK(r.exit_code == 2);
    }
    SUBCASE("numerical abort surfaces as exit 3") {
        // window too small: the front reaches the sentinel cells
        fs::path cfg = write_config(dir, "field.kind=homogeneous\n"
                                         "sim.horizon=30\n"
                                         "sim.window=10\n");
        RunResult r = run_task("simulate", cfg.string(), (dir / "out3").string(), {}, "");
        CHECK(r.exit_code == 3);
        CHECK(r.message.find("sentinel") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("speed task emits the documented artifacts deterministically") {
    fs::path dir = scratch_dir("speed");
    fs::path cfg = write_config(dir, "field.kind=homogeneous\n"
                                     "eigen.p_min=-2\n"
                                     "eigen.p_max=2\n"
                                     "eigen.p_count=9\n");
    RunResult r1 = run_task("speed", cfg.string(), (dir / "a").string(), {}, "");
    REQUIRE(r1.exit_code == 0);
    RunResult r2 = run_task("speed", cfg.string(), (dir / "b").string(), {}, "");
    REQUIRE(r2.exit_code == 0);

    CHECK(slurp(dir / "a" / "speed.json") == slurp(dir / "b" / "speed.json"));
    CHECK(slurp(dir / "a" / "hamiltonian.csv") == slurp(dir / "b" / "hamiltonian.csv"));
    CHECK(strip_timestamp(slurp(dir / "a" / "manifest.json")) ==
          strip_timestamp(slurp(dir / "b" / "manifest.json")));

    std::string speed_json = slurp(dir / "a" / "speed.json");
    for (const char* key :
         {"omega_right_upper", "omega_right_lower", "omega_left_upper", "omega_left_lower",
          "p_star_right", "p_star_left", "media_class", "gap_diag"})
        CHECK(speed_json.find(key) != std::string::npos);

    std::string csv = slurp(dir / "a" / "hamiltonian.csv");
    CHECK(csv.rfind("p,lambda,method,residual,window,eps\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("simulate task artifacts") {
    fs::path dir = scratch_dir("simulate");
    fs::path cfg = write_config(dir, "field.kind=homogeneous\n"
                                     "sim.horizon=10\n"
                                     "sim.window=60\n"
                                     "sim.snapshot_interval=0.5\n"
                                     "sim.harnack_lag=1\n"
                                     "sim.harnack_samples=200\n");
    RunResult r = run_task("simulate", cfg.string(), (dir / "out").string(), {}, "");
    REQUIRE(r.exit_code == 0);
    CHECK(slurp(dir / "out" / "trajectory.csv").rfind("t,i,u\n", 0) == 0);
    CHECK(slurp(dir / "out" / "fronts.csv").rfind("t,level,direction,position\n", 0) == 0);
    CHECK(slurp(dir / "out" / "field.csv").rfind("i,dprime,d,c\n", 0) == 0);
    CHECK(slurp(dir / "out" / "harnack.json").find("\"pass\": true") != std::string::npos);
    CHECK(slurp(dir / "out" / "manifest.json").find("toolkit_version") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("sandwich task propagates acceptance failure as exit 1") {
    fs::path dir = scratch_dir("sandwich");
    // at this horizon the interior > 0.99 check genuinely fails (front lag)
    fs::path cfg = write_config(dir, "field.kind=homogeneous\n"
                                     "sim.horizon=100\n"
                                     "sim.window=340\n"
                                     "sim.snapshot_interval=0.5\n");
    RunResult r = run_task("sandwich", cfg.string(), (dir / "out").string(), {}, "");
    CHECK(r.exit_code == 1);
    CHECK(slurp(dir / "out" / "sandwich.json").find("\"pass\": false") != std::string::npos);
    CHECK(slurp(dir / "out" / "sandwich.csv")
              .rfind("level,direction,fitted_speed,stderr,omega_lower,omega_upper,inside\n", 0) ==
          0);
    fs::remove_all(dir);
}

TEST_CASE("lyapunov task emits the documented curve") {
    fs::path dir = scratch_dir("lyap");
    fs::path cfg = write_config(dir, "field.kind=random_shift\n"
                                     "field.c_law=two_state\nfield.c_lo=0.5\nfield.c_hi=1.5\n"
                                     "field.seed=5\n"
                                     "lyapunov.gamma_count=3\n"
                                     "lyapunov.range=1024\n");
    RunResult r = run_task("lyapunov", cfg.string(), (dir / "out").string(), {}, "");
    REQUIRE(r.exit_code == 0);
    std::string csv = slurp(dir / "out" / "lyapunov.csv");
    CHECK(csv.rfind("gamma,mu,nu,slope_check\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    fs::remove_all(dir);
}

TEST_CASE("ensemble task") {
    fs::path dir = scratch_dir("ensemble");
    SUBCASE("one seed is rejected") {
        fs::path cfg = write_config(dir, "field.kind=random_shift\n"
                                         "field.c_law=two_state\nfield.c_lo=0.5\nfield.c_hi=1.5\n"
                                         "seeds=7\n");
        RunResult r = run_task("ensemble", cfg.string(), (dir / "one").string(), {}, "");
        CHECK(r.exit_code == 2);
    }
    SUBCASE("homogeneous members are seed-independent") {
        fs::path cfg = write_config(dir, "field.kind=homogeneous\nseeds=1,2,3\n");
        RunResult r = run_task("ensemble", cfg.string(), (dir / "homog").string(), {}, "");
        REQUIRE(r.exit_code == 0);
        std::string j = slurp(dir / "homog" / "ensemble.json");
        CHECK(j.find("\"spread_over_mean\": 0.0") != std::string::npos);
    }
    SUBCASE("CLI seeds override the config list") {
        fs::path cfg = write_config(dir, "field.kind=homogeneous\nseeds=1\n");
        RunResult r = run_task("ensemble", cfg.string(), (dir / "cli").string(), {4, 5}, "");
        CHECK(r.exit_code == 0);
        CHECK(slurp(dir / "cli" / "manifest.json").find("4") != std::string::npos);
    }
    fs::remove_all(dir);
}
