#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string &args) {
    const std::string cmd = std::string(BBC_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string sample(const char *name) { return std::string(BBC_SOURCE_DIR) + "/samples/" + name; }

std::string tmp(const char *name) { return (std::filesystem::temp_directory_path() / name).string(); }

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, CompileWritesReport) {
    const auto r = run("compile -i " + sample("two_module.pbc"));
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("\"p_circ\""), std::string::npos);
    EXPECT_NE(r.out.find("synthetic cost model"), std::string::npos);
}

TEST(Cli, ReplayFromReportIsIdentical) {
    const auto first = tmp("bbc_cli_first.json");
    const auto second = tmp("bbc_cli_second.json");
    ASSERT_EQ(run("compile -i " + sample("random30.pbc") + " -M 3 -F 2 --placement lpu -o " + first).code, 0);
    ASSERT_EQ(run("compile --config " + first + " -o " + second).code, 0);
    EXPECT_EQ(slurp(first), slurp(second));
}

TEST(Cli, FlagsOverrideConfigAndEnv) {
    const auto r = run("compile -i " + sample("two_module.pbc") + " --config /dev/null");
    EXPECT_EQ(r.code, 1);
    const auto env = run("compile -i " + sample("two_module.pbc") + " --placement lpu");
    EXPECT_NE(env.out.find("\"placement\": \"lpu\""), std::string::npos);
    const std::string with_env = "env BBC_FACTORIES=3 " + std::string(BBC_CLI_PATH) + " compile -i " +
                                 sample("two_module.pbc") + " | grep -q '\"factories\": 3'";
    EXPECT_EQ(std::system(with_env.c_str()), 0);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("compile -i /nonexistent.pbc").code, 1);
    EXPECT_EQ(run("compile -i " + sample("two_module.pbc") + " -M 1").code, 1);
    EXPECT_EQ(run("compile -i " + sample("two_module.pbc") + " --placement sideways").code, 1);
    EXPECT_EQ(run("--no-such-flag").code, 1);
    EXPECT_EQ(run("--help").code, 0);
    EXPECT_EQ(run("--version").out, "0.1.0\n");
    {
        std::ofstream bad(tmp("bbc_cli_bad.pbc"));
        bad << "qubits 2\nrot XQ pi/4\n";
    }
    EXPECT_EQ(run("compile -i " + tmp("bbc_cli_bad.pbc")).code, 1);
}

TEST(Cli, MissingTableEntryIsInternalError) {
    // A closure table where two-qubit strings are unreachable, then a circuit that needs one.
    const auto spec = tmp("bbc_cli_closure.json");
    const auto table = tmp("bbc_cli_closure.bin");
    {
        std::ofstream out(spec);
        out << R"({"compute_qubits": 2, "measurements": ["XXI", "XZI", "XIX", "XIZ"]})";
    }
    const auto closure = run("cost-table closure " + spec + " -o " + table);
    ASSERT_EQ(closure.code, 0);
    EXPECT_NE(closure.out.find("unreachable: 9"), std::string::npos);
    EXPECT_EQ(run("cost-table verify " + table).code, 0);
    {
        std::ofstream c(tmp("bbc_cli_xx.pbc"));
        c << "qubits 2\nmeas XX\n";
    }
    EXPECT_EQ(run("compile -i " + tmp("bbc_cli_xx.pbc") + " --capacity 2 --cost-table " + table).code, 2);
}

TEST(Cli, GenIsDeterministic) {
    const auto a = run("gen --gen-n 8 --gen-length 50 --gen-seed 3");
    const auto b = run("gen --gen-n 8 --gen-length 50 --gen-seed 3");
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.rfind("qubits 8\n", 0), 0u);
}

TEST(Cli, SweepRatioCsv) {
    const auto r = run("sweep ratio --p-ratios 0.001,0.01 --t-ratios 0.5,1");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
    EXPECT_EQ(run("sweep ratio --p-ratios 0.001,x").code, 1);
}

TEST(Cli, SweepSystemSmoke) {
    const auto out = tmp("bbc_cli_system.csv");
    std::filesystem::remove(out);
    const auto r = run("sweep system --gen-count 2 --gen-n 20 --gen-length 60 --modules-list 2 --factories-list 1 -o " +
                       out + " --summary " + tmp("bbc_cli_summary.csv"));
    EXPECT_EQ(r.code, 0);
    const auto csv = slurp(out);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    EXPECT_NE(slurp(tmp("bbc_cli_summary.csv")).find("2,1,2,"), std::string::npos);
}
