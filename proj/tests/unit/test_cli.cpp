#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "levyfilter_cli_tests";

struct Result {
    int code = -1;
    std::string output;
};

Result run_cli(const std::string& args) {
    fs::create_directories(kWork);
    const fs::path log = kWork / "last.log";
    const std::string cmd = "SOURCE_DATE_EPOCH=0 \"" + std::string(LEVYFILTER_CLI_PATH) + "\" " + args +
                            " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::ostringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const std::string& name, const std::string& body) {
    fs::create_directories(kWork);
    const auto p = kWork / name;
    std::ofstream(p) << body;
    return p;
}

}  // namespace

TEST(Cli, ListsPresets) {
    const auto r = run_cli("presets");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.output.find("example1-discrete-alpha1.5"), std::string::npos);
    EXPECT_NE(r.output.find("cauchy-free-space"), std::string::npos);
}

TEST(Cli, ConfigErrorsExitWithTwo) {
    EXPECT_EQ(run_cli("twin --preset no-such-preset").code, 2);
    const auto bad = write_config("bad.json", R"({"noise": {"alpha": 3.0}})");
    const auto r = run_cli("filter-discrete --config " + bad.string() + " --out " + (kWork / "bad").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("noise.alpha"), std::string::npos) << r.output;
}

TEST(Cli, TwinRunsAreByteIdentical) {
    const auto cfg = write_config("short.json", R"({
        "name": "short", "time": {"t_end": 1.0}, "truth": {"x0": -1.0},
        "init": {"kind": "gaussian", "center": -1.0, "sigma": 0.1}
    })");
    for (const char* d : {"a", "b"}) {
        fs::remove_all(kWork / d);
        const auto r = run_cli("twin --config " + cfg.string() + " --out " + (kWork / d).string() + " --quiet");
        ASSERT_TRUE(r.code == 0 || r.code == 3) << r.output;
    }
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(kWork / "a")) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), kWork / "a");
        EXPECT_EQ(slurp(e.path()), slurp(kWork / "b" / rel)) << rel;
        ++files;
    }
    EXPECT_GE(files, 6u);
    EXPECT_TRUE(fs::exists(kWork / "a" / "truth" / "trajectory.csv"));
    EXPECT_NE(slurp(kWork / "a" / "manifest.json").find("1970-01-01T00:00:00Z"), std::string::npos);
}

TEST(Cli, CompareSubcommand) {
    const auto cfg = write_config("cmp.json", R"({"name": "cmp", "time": {"t_end": 0.5}})");
    fs::remove_all(kWork / "cmp");
    ASSERT_LE(run_cli("filter-discrete --config " + cfg.string() + " --out " + (kWork / "cmp").string()).code, 3);
    const auto r = run_cli("compare " + (kWork / "cmp").string() + " " + (kWork / "cmp").string() +
                           " --metric l1_density --out " + (kWork / "cmp_out").string());
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_TRUE(fs::exists(kWork / "cmp_out" / "l1_density.json"));
    EXPECT_EQ(run_cli("compare " + (kWork / "cmp").string() + " " + (kWork / "missing").string() +
                      " --metric l1_density").code,
              2);
    // Both directories exist but one holds no density.csv.
    fs::create_directories(kWork / "empty");
    EXPECT_EQ(run_cli("compare " + (kWork / "cmp").string() + " " + (kWork / "empty").string() +
                      " --metric l1_density").code,
              1);
}
