// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// Drives the actual binary. The first program argument is the CLI path.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string g_cli;

int run(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string sub(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

} // namespace

TEST_CASE("cli: no subcommand fails") { CHECK(run("") != 0); }

TEST_CASE("cli: analyze with a missing input exits nonzero") {
    TempDir tmp("gazeirl_cli_missing");
    CHECK(run("analyze --gaze " + tmp.sub("absent.csv") + " --scene " +
              tmp.sub("absent.json") + " --objects " + tmp.sub("absent2.json") + " --out " +
              tmp.sub("out")) != 0);
}

TEST_CASE("cli: synth then analyze then birl --demos") {
    TempDir tmp("gazeirl_cli_flow");
    write(tmp.sub("config.json"),
          R"({"n_configs": 3, "n_replicates": 1, "demo_counts": [1],
              "birl": {"chain_length": 1500, "burn_in": 300}})");

    CHECK(run("--config " + tmp.sub("config.json") + " --seed 9 --out " + tmp.sub("synth") +
              " synth --n 2 --preset video --instruction plate-left") == 0);
    CHECK(std::filesystem::exists(tmp.sub("synth") + "/demos.json"));

    CHECK(run("--config " + tmp.sub("config.json") + " --seed 9 --out " + tmp.sub("an") +
              " analyze --gaze " + tmp.sub("synth") + "/gaze_0.csv --scene " +
              tmp.sub("synth") + "/scene.json --objects " + tmp.sub("synth") +
              "/objects.json") == 0);
    CHECK(std::filesystem::exists(tmp.sub("an") + "/fixations.csv"));
    // no keyframes given -> no keyframe outputs
    CHECK_FALSE(std::filesystem::exists(tmp.sub("an") + "/keyframe_report.csv"));

    CHECK(run("--config " + tmp.sub("config.json") + " --seed 9 --out " + tmp.sub("birl") +
              " --jobs 2 birl --demos " + tmp.sub("synth") + "/demos.json") == 0);
    CHECK(std::filesystem::exists(tmp.sub("birl") + "/policy_loss.csv"));
}

TEST_CASE("cli: repeated birl runs with one seed are byte-identical") {
    TempDir tmp("gazeirl_cli_det");
    write(tmp.sub("config.json"),
          R"({"n_configs": 2, "n_replicates": 1, "demo_counts": [1],
              "birl": {"chain_length": 1200, "burn_in": 300}})");
    const std::string base = "--config " + tmp.sub("config.json") + " --seed 4242 ";
    CHECK(run(base + "--out " + tmp.sub("a") + " --jobs 2 birl") == 0);
    CHECK(run(base + "--out " + tmp.sub("b") + " --jobs 1 birl") == 0);
    for (const char* name : {"/policy_loss.csv", "/placement_loss.csv", "/results.csv"})
        CHECK(slurp(tmp.sub("a") + name) == slurp(tmp.sub("b") + name));
}

TEST_CASE("cli: GAZEIRL_OUT env var sets the output directory") {
    TempDir tmp("gazeirl_cli_env");
    ::setenv("GAZEIRL_OUT", tmp.sub("envout").c_str(), 1);
    CHECK(run("--seed 3 synth --n 1") == 0);
    ::unsetenv("GAZEIRL_OUT");
    CHECK(std::filesystem::exists(tmp.sub("envout") + "/demos.json"));
}

int main(int argc, char** argv) {
    doctest::Context context;
    std::vector<char*> doctest_args;
    for (int i = 0; i < argc; ++i) {
        const std::string arg = argv[i];
        if (i > 0 && arg.rfind("--", 0) != 0 && g_cli.empty())
            g_cli = arg;
        else
            doctest_args.push_back(argv[i]);
    }
    if (g_cli.empty()) {
        std::fprintf(stderr, "usage: test_cli <path-to-gazeirl-binary>\n");
        return 2;
    }
    context.applyCommandLine(static_cast<int>(doctest_args.size()), doctest_args.data());
    return context.run();
}
