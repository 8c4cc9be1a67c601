// End-to-end tests of the command line binary: exit codes, output files,
// column layout and byte-level determinism.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef PLATEMEM_CLI_PATH
#error "PLATEMEM_CLI_PATH must point at the built binary"
#endif

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "platemem_cli_tests";

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PLATEMEM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

fs::path write_config(const std::string& name, const std::string& text) {
    fs::create_directories(kScratch);
    const fs::path path = kScratch / name;
    std::ofstream out(path);
    out << text;
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

// cheap converging run: small basis, short horizon
const char* kSmallRun = "side = pi\n"
                        "modes = 6\n"
                        "nonlinearity = cubic:1\n"
                        "dt = 0.01\n"
                        "total_time = 20\n"
                        "sample_stride = 10\n"
                        "seed = 4242\n";

} // namespace

TEST_CASE("zero-length runs emit the header and exactly one sample") {
    fs::path cfg = write_config("t0.cfg", "side = pi\nmodes = 4\ndt = 0.01\ntotal_time = 0\n");
    fs::path out = kScratch / "t0_out";
    fs::remove_all(out);
    CHECK(run_cli("simulate --config " + cfg.string() + " --out " + out.string()) == 0);
    std::vector<std::string> lines = read_lines(out / "series.csv");
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "t,E,H,J,norm_v,norm_theta,norm_eta_M1,grad_v_sq,dissipation_residual,"
                      "stat_residual,dist_V0,dist_u_V2");
    CHECK(fs::exists(out / "summary.json"));
}

TEST_CASE("identical configurations produce byte-identical output") {
    fs::path cfg = write_config("det.cfg", kSmallRun);
    fs::path out1 = kScratch / "det_out1";
    fs::path out2 = kScratch / "det_out2";
    fs::remove_all(out1);
    fs::remove_all(out2);
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " + out1.string()) == 0);
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " + out2.string()) == 0);
    CHECK(slurp(out1 / "series.csv") == slurp(out2 / "series.csv"));
    CHECK(slurp(out1 / "summary.json") == slurp(out2 / "summary.json"));
}

TEST_CASE("malformed configuration exits with the config error code and writes nothing") {
    fs::path cfg = write_config("bad.cfg", "modes = 6\nmodse = 8\n");
    fs::path out = kScratch / "bad_out";
    fs::remove_all(out);
    CHECK(run_cli("simulate --config " + cfg.string() + " --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out / "series.csv"));
    CHECK_FALSE(fs::exists(out / "summary.json"));
}

TEST_CASE("a missing configuration file exits with the config error code") {
    CHECK(run_cli("simulate --config " + (kScratch / "does_not_exist.cfg").string()) == 2);
}

TEST_CASE("the decomposition of an unforced run has a vanishing compensating part") {
    fs::path cfg = write_config("lin.cfg", "side = pi\nmodes = 6\nnonlinearity = zero\n"
                                           "dt = 0.01\ntotal_time = 2\nsample_stride = 10\nseed = 7\n");
    fs::path out = kScratch / "lin_out";
    fs::remove_all(out);
    REQUIRE(run_cli("decompose --config " + cfg.string() + " --out " + out.string()) == 0);
    std::vector<std::string> lines = read_lines(out / "series.csv");
    REQUIRE(lines.size() > 2);
    // locate the compensating-part column from the header
    std::vector<std::string> cols;
    {
        std::istringstream hs(lines[0]);
        std::string c;
        while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    int zc_col = -1;
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (cols[i] == "norm_zC_V0") zc_col = static_cast<int>(i);
    REQUIRE(zc_col >= 0);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        std::istringstream row(lines[r]);
        std::string cell;
        for (int i = 0; i <= zc_col; ++i) REQUIRE(std::getline(row, cell, ','));
        CHECK(std::stod(cell) == 0.0);
    }
}

TEST_CASE("the steady sweep reports all cubic branches once") {
    fs::path cfg = write_config("steady.cfg", "side = pi\nmodes = 8\nnonlinearity = cubic:4\ndt = 0.01\n");
    fs::path out = kScratch / "steady_out";
    fs::remove_all(out);
    REQUIRE(run_cli("steady --config " + cfg.string() + " --out " + out.string()) == 0);
    const std::string json = slurp(out / "equilibria.json");
    std::size_t count = 0;
    for (std::size_t pos = json.find("\"residual_Vm2\""); pos != std::string::npos;
         pos = json.find("\"residual_Vm2\"", pos + 1))
        ++count;
    CHECK(count == 3);
}

TEST_CASE("kernel admissibility checks drive the exit code") {
    SUBCASE("exponential kernels pass") {
        fs::path cfg = write_config("kexp.cfg", "side = pi\nmodes = 4\nkernel = exponential:1,1\ndt = 0.01\n");
        fs::path out = kScratch / "kexp_out";
        fs::remove_all(out);
        CHECK(run_cli("kernel-check --config " + cfg.string() + " --out " + out.string()) == 0);
        CHECK(fs::exists(out / "kernel_check.json"));
    }
    SUBCASE("an algebraic-tail table kernel fails") {
        fs::create_directories(kScratch);
        const fs::path table = kScratch / "algebraic.tbl";
        {
            std::ofstream tf(table);
            tf << 0.0 << " " << 1.0 << "\n";
            for (double s = 1e-3; s <= 1e7; s *= 1.05)
                tf << s << " " << 1.0 / ((1.0 + s) * (1.0 + s)) << "\n";
        }
        fs::path cfg = write_config("ktab.cfg", "side = pi\nmodes = 4\nkernel = table:" + table.string() +
                                                    "\ndt = 0.01\ntail_tol = 1e-4\n");
        fs::path out = kScratch / "ktab_out";
        fs::remove_all(out);
        CHECK(run_cli("kernel-check --config " + cfg.string() + " --out " + out.string()) == 1);
        CHECK(fs::exists(out / "kernel_check.json"));
        // the verify command rejects the same kernel up front
        fs::path vout = kScratch / "ktab_verify_out";
        fs::remove_all(vout);
        CHECK(run_cli("verify --config " + cfg.string() + " --out " + vout.string()) == 1);
        CHECK(fs::exists(vout / "verify.json"));
    }
}

TEST_CASE("rate fitting over an existing series") {
    fs::path cfg = write_config("rate.cfg", kSmallRun);
    fs::path out = kScratch / "rate_out";
    fs::remove_all(out);
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(run_cli("rate --out " + out.string()) == 0);
    const std::string json = slurp(out / "rate.json");
    CHECK(json.find("lojasiewicz_probe") != std::string::npos);
    // pointing at a directory without a series is a usage error
    fs::path empty = kScratch / "rate_empty";
    fs::create_directories(empty);
    CHECK(run_cli("rate --out " + empty.string()) == 2);
}
