#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "shapepde/studies.hpp"

using namespace shapepde;
namespace fs = std::filesystem;

namespace {

fs::path sandbox(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("shapepde_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

const char* kRateCfg = R"(study = rate-study
[shape]
kind = box
lo = -1
hi = 1
[params]
a_list = 1e-1,1e-2,1e-3,1e-4,1e-5
zeta = 0
omega_lo = -2
omega_hi = 2
[output]
dir = {OUT}
)";

}  // namespace

TEST_CASE("config parsing errors carry line numbers") {
    CHECK_THROWS_AS(load_config_text("study = distance\n[shape\n"), ConfigError);
    try {
        load_config_text("study = distance\n[shape]\nkind = ball\ncenter = 0,0\nradius = abc\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 5);
        CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config_text("study = nonsense\n"), ConfigError);
    CHECK_THROWS_AS(load_config_text("threads = 2\n"), ConfigError);  // missing study
    // a_list must decrease
    CHECK_THROWS_AS(load_config_text("study = distance\n[params]\na_list = 1e-3,1e-2\n"),
                    ConfigError);
}

TEST_CASE("shape block round trip") {
    StudyConfig cfg = load_config_text(
        "study = corner-study\n[shape]\nkind = polygon\nvertices = 0,0; 1,0; 0,1\n");
    REQUIRE(cfg.shape.has_value());
    CHECK(cfg.shape->dim == 2);
    StudyConfig u = load_config_text(
        "study = distance\n[shape]\nkind = union\nmembers = 2\n"
        "[shape_1]\nkind = ball\ncenter = -2,0\nradius = 0.5\n"
        "[shape_2]\nkind = ball\ncenter = 2,0\nradius = 0.5\n");
    REQUIRE(u.shape.has_value());
    CHECK(contains(*u.shape, vec2(2.1, 0)));
}

TEST_CASE("rate study via run_study: artifacts, summary, determinism") {
    fs::path out = sandbox("rate");
    std::string cfg_text = kRateCfg;
    cfg_text.replace(cfg_text.find("{OUT}"), 5, out.string());
    StudyConfig cfg = load_config_text(cfg_text);
    StudyResult result = run_study(cfg, false);
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(out / "rate.csv"));
    CHECK(fs::exists(out / "summary.txt"));
    std::string first = slurp(out / "rate.csv");
    std::string summary = slurp(out / "summary.txt");
    CHECK(summary.find("best_model=") != std::string::npos);
    // byte-identical rerun
    StudyResult again = run_study(cfg, false);
    CHECK(slurp(out / "rate.csv") == first);
    fs::remove_all(out);
}

TEST_CASE("cli entry: exit codes") {
    fs::path dir = sandbox("exitcodes");
    std::string good = (dir / "good.cfg").string();
    std::string cfg_text = kRateCfg;
    cfg_text.replace(cfg_text.find("{OUT}"), 5, (dir / "out").string());
    spit(good, cfg_text);
    {
        const char* argv[] = {"shape-pde", "run", good.c_str()};
        CHECK(run_cli(3, argv) == 0);
    }
    // malformed numeric field: exit 2
    std::string bad = (dir / "bad.cfg").string();
    spit(bad, "study = distance\n[shape]\nkind = ball\ncenter = 0,0\nradius = abc\n");
    {
        const char* argv[] = {"shape-pde", "run", bad.c_str()};
        CHECK(run_cli(3, argv) == 2);
    }
    {
        const char* argv[] = {"shape-pde", "frobnicate"};
        CHECK(run_cli(2, argv) == 2);
    }
    fs::remove_all(dir);
}

TEST_CASE("check mode: injected sloppy tolerance fails the 1-D oracle check") {
    fs::path dir = sandbox("check1d");
    auto make_cfg = [&](const std::string& tol, const std::string& out) {
        return std::string("study = distance\n[shape]\nkind = box\nlo = -1\nhi = 1\n") +
               "[grid]\nlo = -2\nhi = 2\nn = 257\n[params]\na_list = 1e-2\ntol = " + tol +
               "\ncouple_grid = 0\n[output]\ndir = " + out + "\n";
    };
    StudyConfig sloppy = load_config_text(make_cfg("1e-2", (dir / "sloppy").string()));
    StudyResult bad = run_study(sloppy, true);
    CHECK(bad.exit_code == 4);
    CHECK_FALSE(bad.check_failures.empty());

    StudyConfig tight = load_config_text(make_cfg("1e-12", (dir / "tight").string()));
    StudyResult good = run_study(tight, true);
    CHECK(good.exit_code == 0);
    fs::remove_all(dir);
}

TEST_CASE("out dir override via flag") {
    fs::path dir = sandbox("outflag");
    std::string cfgp = (dir / "cfg.cfg").string();
    std::string cfg_text = kRateCfg;
    cfg_text.replace(cfg_text.find("{OUT}"), 5, (dir / "ignored").string());
    spit(cfgp, cfg_text);
    fs::path target = dir / "override";
    std::string target_str = target.string();
    const char* argv[] = {"shape-pde", "run", cfgp.c_str(), "--out", target_str.c_str()};
    CHECK(run_cli(5, argv) == 0);
    CHECK(fs::exists(target / "rate.csv"));
    CHECK_FALSE(fs::exists(dir / "ignored"));
    fs::remove_all(dir);
}
