#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "support/fixtures.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
#ifdef PPKM_CLI_PATH
    return PPKM_CLI_PATH;
#else
    return "ppkm";
#endif
}

struct run_result {
    int exit_code = -1;
    std::string out;
    std::string err;
};

struct sandbox {
    fs::path dir;

    sandbox() {
        static int counter = 0;
        dir = fs::temp_directory_path() /
              ("ppkm_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(dir);
    }
    ~sandbox() { fs::remove_all(dir); }

    std::string file(const std::string& name) const { return (dir / name).string(); }
};

run_result run(const std::string& args, const sandbox& box) {
    const std::string out_file = box.file("stdout.txt");
    const std::string err_file = box.file("stderr.txt");
    const std::string cmd =
        "\"" + cli_path() + "\" " + args + " > \"" + out_file + "\" 2> \"" + err_file + "\"";
    const int status = std::system(cmd.c_str());
    run_result r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = fixtures::read_file(out_file);
    r.err = fixtures::read_file(err_file);
    return r;
}

std::string synthetic_args() {
    return "--cases " + fixtures::data_dir() + "/synthetic/cases.csv --occupancy " +
           fixtures::data_dir() + "/synthetic/occupancy.csv --population 10467629 "
           "--anchor 2021-08-07";
}

} // namespace

TEST_CASE("estimate on the synthetic fixture produces near-constant rows") {
    sandbox box;
    const auto r = run("estimate " + synthetic_args() + " --from 0 --to 30 --out " +
                           box.dir.string(),
                       box);
    INFO(r.err);
    REQUIRE(r.exit_code == 0);

    const auto tab = fixtures::read_table(box.file("rates.csv"));
    REQUIRE(tab.header ==
            std::vector<std::string>({"t", "alpha", "beta", "residual_norm", "active_bounds"}));
    REQUIRE(tab.rows.size() == 31);
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
        // Counts are integer-rounded in the fixture, so recovery is only
        // approximate; beta is tightly identified, alpha less so.
        CHECK(std::fabs(tab.num(i, "alpha") - 0.07) < 0.03);
        CHECK(std::fabs(tab.num(i, "beta") - 0.028) < 1e-5);
        CHECK(tab.cell(i, "active_bounds") == "none");
        CHECK(tab.num(i, "residual_norm") >= 0.0);
    }
}

TEST_CASE("estimate range outside coverage fails with a data error") {
    sandbox box;
    const auto r = run("estimate " + synthetic_args() + " --from -10 --to 30 --out " +
                           box.dir.string(),
                       box);
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("\"coverage_gap\"") != std::string::npos);
}

TEST_CASE("reff writes both variants with their per-day difference") {
    sandbox box;
    const auto r = run("reff " + synthetic_args() + " --from 0 --to 30 --variant both --out " +
                           box.dir.string(),
                       box);
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    const auto tab = fixtures::read_table(box.file("reff.csv"));
    REQUIRE(tab.header == std::vector<std::string>({"t", "reff_data", "reff_sim", "abs_diff"}));
    REQUIRE(tab.rows.size() == 31);
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
        CHECK(tab.num(i, "reff_data") > 0.45);
        CHECK(tab.num(i, "reff_data") < 0.65);
        CHECK(tab.num(i, "abs_diff") ==
              Catch::Approx(std::fabs(tab.num(i, "reff_data") - tab.num(i, "reff_sim")))
                  .margin(1e-12));
    }
}

TEST_CASE("clamping incidence to zero zeroes the reff column") {
    sandbox box;
    const auto r = run("reff " + synthetic_args() +
                           " --from 0 --to 5 --variant data --bounds 0,1,0,0 --out " +
                           box.dir.string(),
                       box);
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    const auto tab = fixtures::read_table(box.file("reff.csv"));
    REQUIRE(tab.rows.size() == 6);
    for (std::size_t i = 0; i < tab.rows.size(); ++i) CHECK(tab.num(i, "reff") == 0.0);
}

TEST_CASE("reff single-variant table keeps the variant column") {
    sandbox box;
    const auto r = run("reff " + synthetic_args() + " --from 10 --to 12 --variant data --out " +
                           box.dir.string(),
                       box);
    REQUIRE(r.exit_code == 0);
    const auto tab = fixtures::read_table(box.file("reff.csv"));
    REQUIRE(tab.header == std::vector<std::string>({"t", "reff", "variant"}));
    REQUIRE(tab.rows.size() == 3);
    CHECK(tab.cell(0, "variant") == "data");
}

TEST_CASE("classify single points") {
    sandbox box;
    struct expectation {
        const char* point;
        const char* level;
    };
    for (const auto& e : {expectation{"0.5366,0.43", "level_4"},
                          expectation{"0.30,0.10", "at_most_2"},
                          expectation{"0.40,0.20", "at_most_2"},
                          expectation{"0.80,0.50", "level_4"}}) {
        const auto r = run(std::string("classify --point ") + e.point + " --out " +
                               box.dir.string(),
                           box);
        REQUIRE(r.exit_code == 0);
        const auto tab = fixtures::read_table(box.file("policy.csv"));
        REQUIRE(tab.rows.size() == 1);
        INFO("point " << e.point);
        CHECK(tab.cell(0, "level") == e.level);
    }
}

TEST_CASE("classify a bundled series splits levels at day 18") {
    sandbox box;
    const auto r = run("classify --series " + fixtures::data_dir() +
                           "/reference/fig_points.csv --out " + box.dir.string(),
                       box);
    REQUIRE(r.exit_code == 0);
    const auto tab = fixtures::read_table(box.file("policy.csv"));
    REQUIRE(tab.rows.size() == 31);
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
        const long t = static_cast<long>(tab.num(i, "t"));
        CHECK(tab.cell(i, "level") == (t <= 17 ? "level_4" : "level_3"));
    }
}

TEST_CASE("simulate one step from explicit state matches the reference evaluation") {
    sandbox box;
    const auto r = run("simulate --initial 9652496,12799,802334 --alpha 0.08816448 "
                       "--beta 0.03019077 --rho 0.43 --horizon 1 --out " +
                           box.dir.string(),
                       box);
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    const auto tab = fixtures::read_table(box.file("trajectory.csv"));
    REQUIRE(tab.header == std::vector<std::string>({"t", "S", "I", "R"}));
    REQUIRE(tab.rows.size() == 2);
    CHECK(tab.num(1, "S") == Catch::Approx(9651592.8179489710).margin(1e-6));
    CHECK(tab.num(1, "I") == Catch::Approx(13134.348533277422).margin(1e-6));
    CHECK(tab.num(1, "R") == Catch::Approx(802300.38693926012).margin(1e-6));
}

TEST_CASE("simulate horizon zero emits only the initial state") {
    sandbox box;
    const auto r =
        run("simulate --initial 100,10,5 --horizon 0 --out " + box.dir.string(), box);
    REQUIRE(r.exit_code == 0);
    const auto tab = fixtures::read_table(box.file("trajectory.csv"));
    REQUIRE(tab.rows.size() == 1);
    CHECK(tab.num(0, "S") == 100.0);
}

TEST_CASE("simulate keeps an empty infected compartment at zero") {
    sandbox box;
    const auto r = run("simulate --initial 1000000,0,5000 --alpha 0.1 --beta 0.9 --rho 0.3 "
                       "--horizon 20 --out " +
                           box.dir.string(),
                       box);
    REQUIRE(r.exit_code == 0);
    const auto tab = fixtures::read_table(box.file("trajectory.csv"));
    REQUIRE(tab.rows.size() == 21);
    for (std::size_t i = 0; i < tab.rows.size(); ++i) CHECK(tab.num(i, "I") == 0.0);
}

TEST_CASE("simulate surfaces negative compartments as numeric errors") {
    sandbox box;
    const auto r = run("simulate --initial 1000,1000000,0 --alpha 0 --beta 1 --rho 0 "
                       "--horizon 1 --out " +
                           box.dir.string(),
                       box);
    CHECK(r.exit_code == 4);
    CHECK(r.err.find("\"negative_compartment\"") != std::string::npos);
    CHECK(r.err.find("\"day\":0") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
    sandbox box;
    CHECK(run("estimate --no-such-flag", box).exit_code == 2);
    CHECK(run("classify", box).exit_code == 2);
    CHECK(run("", box).exit_code == 2);
    CHECK(run("estimate --cases nope.csv --occupancy also_nope.csv", box).exit_code == 2);
}

TEST_CASE("config file drives a run and flags override it") {
    sandbox box;
    std::ofstream(box.file("config.json"))
        << "{\n"
           "  \"cases\": \"" << fixtures::data_dir() << "/synthetic/cases.csv\",\n"
           "  \"occupancy\": \"" << fixtures::data_dir() << "/synthetic/occupancy.csv\",\n"
           "  \"anchor\": \"2021-08-07\",\n"
           "  \"population\": 10467629,\n"
           "  \"window\": 100,\n"
           "  \"out\": \"" << box.dir.string() << "\"\n"
           "}\n";

    // window 100 exceeds coverage before day 0 -> data error...
    const auto bad = run("estimate --config " + box.file("config.json") + " --from 0 --to 30", box);
    CHECK(bad.exit_code == 3);
    // ...but a flag override wins over the config value.
    const auto good = run("estimate --config " + box.file("config.json") +
                              " --from 0 --to 30 --window 90",
                          box);
    INFO(good.err);
    CHECK(good.exit_code == 0);
    CHECK(fs::exists(box.file("rates.csv")));

    const auto broken = run("estimate --config " + box.file("stdout.txt"), box);
    CHECK(broken.exit_code == 2);
}

TEST_CASE("json format mirrors the csv tables") {
    sandbox box;
    const auto r = run("classify --point 0.5,0.3 --format json --out " + box.dir.string(), box);
    REQUIRE(r.exit_code == 0);
    const std::string text = fixtures::read_file(box.file("policy.json"));
    CHECK(text.find("\"level\": \"level_4\"") != std::string::npos);
    CHECK(text.find("\"reff\": 0.5") != std::string::npos);
}

TEST_CASE("report bundles are deterministic") {
    sandbox box;
    const std::string base = "report " + synthetic_args() + " --from 0 --to 30 ";
    const auto r1 = run(base + "--threads 1 --out " + box.file("run1"), box);
    const auto r2 = run(base + "--threads 1 --out " + box.file("run2"), box);
    const auto r4 = run(base + "--threads 4 --out " + box.file("run4"), box);
    INFO(r1.err);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    REQUIRE(r4.exit_code == 0);

    for (const char* name : {"rates.csv", "reff.csv", "policy.csv", "summary.json"}) {
        INFO(name);
        const auto a = fixtures::read_file(box.file(std::string("run1/") + name));
        CHECK(a == fixtures::read_file(box.file(std::string("run2/") + name)));
        CHECK(a == fixtures::read_file(box.file(std::string("run4/") + name)));
        CHECK_FALSE(a.empty());
    }
}

TEST_CASE("report levels transition from 4 to 3 at the occupancy crossing") {
    sandbox box;
    const auto r = run("report " + synthetic_args() + " --from 0 --to 30 --out " +
                           box.dir.string(),
                       box);
    REQUIRE(r.exit_code == 0);

    const auto policy = fixtures::read_table(box.file("policy.csv"));
    REQUIRE(policy.rows.size() == 31);
    for (std::size_t i = 0; i < policy.rows.size(); ++i) {
        const long t = static_cast<long>(policy.num(i, "t"));
        INFO("day " << t);
        CHECK(policy.cell(i, "level") == (t <= 17 ? "level_4" : "level_3"));
    }

    // summary.json agrees with the policy table.
    const std::string summary = fixtures::read_file(box.file("summary.json"));
    CHECK(summary.find("\"level\": \"level_4\"") != std::string::npos);
    CHECK(summary.find("\"level\": \"level_3\"") != std::string::npos);
    CHECK(summary.find("\"rho_split\": 0.2") != std::string::npos);
}

TEST_CASE("simulate can replay an estimated rates table") {
    sandbox box;
    const auto est = run("estimate " + synthetic_args() + " --from 0 --to 10 --out " +
                             box.dir.string(),
                         box);
    REQUIRE(est.exit_code == 0);
    const auto sim = run("simulate " + synthetic_args() + " --rates " + box.file("rates.csv") +
                             " --out " + box.dir.string(),
                         box);
    INFO(sim.err);
    REQUIRE(sim.exit_code == 0);
    const auto tab = fixtures::read_table(box.file("trajectory.csv"));
    REQUIRE(tab.rows.size() == 12); // 11 rates rows -> 12 states
    CHECK(tab.num(0, "t") == 0.0);
    // Seed state comes from the dataset row at day 0.
    CHECK(tab.num(0, "S") + tab.num(0, "I") + tab.num(0, "R") == 10467629.0);
}
