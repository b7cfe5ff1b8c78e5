#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "compkit/csv.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string("\"") + COMPKIT_BIN + "\" " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::path("cli_test_tmp") / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string out_arg(const fs::path& dir) { return " --out " + (dir / "out").string(); }

void write_config(const fs::path& path, const std::string& body) {
    compkit::write_file(path.string(), body);
}

const compkit::CsvTable load_table(const fs::path& p) {
    std::string body = compkit::read_file(p.string());
    while (!body.empty() && body[0] == '#') body.erase(0, body.find('\n') + 1);
    return compkit::parse_csv(body);
}

}  // namespace

TEST_CASE("generate-task materializes the dataset with a manifest", "[cli]") {
    fs::path dir = fresh_dir("generate");
    write_config(dir / "task.cfg",
                 "task = symbolic_addition\n"
                 "values = -4,-3,-2,-1,0,1,2,3,4\n"
                 "anchors = 0\n");
    REQUIRE(run_cli("generate-task --config " + (dir / "task.cfg").string() + out_arg(dir)) == 0);

    compkit::CsvTable ds = load_table(dir / "out" / "dataset.csv");
    REQUIRE(ds.header == std::vector<std::string>{"z_0", "z_1", "target", "split"});
    REQUIRE(ds.rows.size() == 81);

    compkit::CsvTable manifest = load_table(dir / "out" / "manifest.csv");
    REQUIRE(manifest.header == std::vector<std::string>{"path", "bytes", "fnv1a64"});
    bool has_dataset = false;
    for (const auto& row : manifest.rows)
        if (row[0] == "dataset.csv") has_dataset = true;
    REQUIRE(has_dataset);
}

TEST_CASE("analyze reports the analytic addition slope", "[cli]") {
    fs::path dir = fresh_dir("analyze");
    write_config(dir / "task.cfg",
                 "task = symbolic_addition\n"
                 "values = -4,-3,-2,-1,0,1,2,3,4\n"
                 "anchors = 0\n"
                 "salience = 0.4,0.2\n");
    REQUIRE(run_cli("analyze --config " + (dir / "task.cfg").string() + out_arg(dir)) == 0);

    compkit::CsvTable slope = load_table(dir / "out" / "slope.csv");
    bool checked = false;
    for (const auto& row : slope.rows)
        if (row[0] == "TestOnly") {
            REQUIRE(std::stod(row[1]) == Catch::Approx(2.0 / 3.0).margin(1e-9));
            REQUIRE(std::stod(row[2]) == Catch::Approx(0.0).margin(1e-9));
            checked = true;
        }
    REQUIRE(checked);
    REQUIRE(fs::exists(dir / "out" / "additivity.csv"));
}

TEST_CASE("unknown configuration keys are usage errors", "[cli]") {
    fs::path dir = fresh_dir("badkey");
    write_config(dir / "task.cfg",
                 "task = invariance\n"
                 "salience = 0.4,0.2\n"
                 "junk = 1\n");
    REQUIRE(run_cli("fit --config " + (dir / "task.cfg").string() + out_arg(dir)) == 1);
}

TEST_CASE("a non-PSD similarity table is a numerical failure", "[cli]") {
    fs::path dir = fresh_dir("nonpsd");
    write_config(dir / "task.cfg",
                 "task = invariance\n"
                 "kappa = 0,1,0.1\n");
    REQUIRE(run_cli("build-kernel --config " + (dir / "task.cfg").string() + out_arg(dir)) == 2);
}

TEST_CASE("verify-oracles passes without a config", "[cli]") {
    fs::path dir = fresh_dir("verify");
    REQUIRE(run_cli("verify-oracles" + out_arg(dir)) == 0);
    compkit::CsvTable t = load_table(dir / "out" / "verify.csv");
    REQUIRE(t.rows.size() >= 100);
    for (const auto& row : t.rows) REQUIRE(row.back() == "1");
}

TEST_CASE("usage errors exit with code 1", "[cli]") {
    REQUIRE(run_cli("no-such-subcommand") == 1);
    REQUIRE(run_cli("generate-task") == 1);  // --config is required
}

TEST_CASE("sweeps are reproducible byte for byte", "[cli]") {
    fs::path dir = fresh_dir("sweep");
    write_config(dir / "sweep.cfg",
                 "task = context_dependence\n"
                 "variants = 1,3\n"
                 "metric = test_accuracy\n"
                 "s1 = 0.05,0.10\n"
                 "s2 = 0.01\n");
    const std::string base = "sweep --config " + (dir / "sweep.cfg").string();
    REQUIRE(run_cli(base + " --out " + (dir / "a").string() + " --no-plots") == 0);
    REQUIRE(run_cli(base + " --out " + (dir / "b").string() + " --no-plots --jobs 2") == 0);
    REQUIRE(compkit::read_file((dir / "a" / "sweep.csv").string()) ==
            compkit::read_file((dir / "b" / "sweep.csv").string()));
    REQUIRE_FALSE(fs::exists(dir / "a" / "sweep.svg"));
}

TEST_CASE("depth-salience writes plots unless suppressed", "[cli]") {
    fs::path dir = fresh_dir("depth");
    write_config(dir / "depth.cfg",
                 "components = 2\n"
                 "depth = 24\n"
                 "leak = 0,0.2\n");
    REQUIRE(run_cli("depth-salience --config " + (dir / "depth.cfg").string() + out_arg(dir)) ==
            0);
    REQUIRE(fs::exists(dir / "out" / "depth_salience.svg"));
    REQUIRE(fs::exists(dir / "out" / "depth_verdicts.csv"));

    compkit::CsvTable v = load_table(dir / "out" / "depth_verdicts.csv");
    REQUIRE(v.rows.size() == 2);
}
