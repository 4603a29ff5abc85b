// SPDX-License-Identifier: Apache-2.0
//
// pmldpe: pseudo maximum likelihood direct position estimation for mobile arrays
// Copyright (C) 2026 The pmldpe authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "pmldpe/cli.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pmldpe;

namespace
{
    int run(std::vector<std::string> args, std::string &out, std::string &err)
    {
        args.insert(args.begin(), "pmldpe");
        std::vector<const char *> argv;
        for (const auto &a : args)
            argv.push_back(a.c_str());
        std::ostringstream o, e;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
        out = o.str();
        err = e.str();
        return code;
    }

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream os;
        os << is.rdbuf();
        return os.str();
    }

    const std::string preset = std::string(PMLDPE_PRESET_DIR) + "/ci_1bs.ini";
}

TEST_CASE("parse simulate")
{
    const char *argv[] = {"pmldpe", "simulate", "--scenario", preset.c_str(), "--out", "results/", "--set",
                          "scenario.trials=2", "--seed", "5"};
    const CliOptions o = parse_args(10, argv);
    CHECK(o.command == Command::simulate);
    CHECK(o.scenario == preset);
    CHECK(o.out_dir == "results/");
    CHECK(o.overrides == std::vector<std::string>{"scenario.trials=2"});
    CHECK(*o.seed == 5);
}

TEST_CASE("usage errors exit with 2")
{
    std::string out, err;
    CHECK(run({"simulate"}, out, err) == 2);
    CHECK(err.find("--scenario") != std::string::npos);
    CHECK(run({"simulate", "--scenario", preset, "--bogus"}, out, err) == 2);
    CHECK(run({"simulate", "--scenario", "/no/such/file.ini"}, out, err) == 2);
    CHECK(run({}, out, err) == 2);
    CHECK(run({"feasibility", "--alpha", "3"}, out, err) == 2);
    CHECK(run({"--help"}, out, err) == 0);
    CHECK(out.find("simulate") != std::string::npos);
}

TEST_CASE("feasibility report")
{
    std::string out, err;
    REQUIRE(run({"feasibility", "--bd", "512", "--bc", "250000", "--alpha", "0.5", "--tobs", "325e-6"}, out, err) == 0);
    CHECK(out.find("snapshots N              16") != std::string::npos);
    CHECK(out.find("stationarity at 100.0 m") != std::string::npos);
    CHECK(run({"feasibility", "--tobs", "0.01"}, out, err) == 1);
    CHECK(err.find("T_obs <= T_c") != std::string::npos);
}

TEST_CASE("simulate output is byte-reproducible")
{
    const auto dir = std::filesystem::temp_directory_path() / "pmldpe_cli_test";
    std::filesystem::remove_all(dir);
    const std::vector<std::string> args{"simulate",   "--scenario", preset, "--out", (dir / "a").string(),
                                        "--trials",   "1",          "--seed", "3",   "--quiet",
                                        "--set",      "scenario.duration_s=0.3",     "--set",
                                        "estimator.grid_spacing_m=4"};
    std::string out, err;
    REQUIRE(run(args, out, err) == 0);
    auto second = args;
    second[4] = (dir / "b").string();
    REQUIRE(run(second, out, err) == 0);
    const std::string a = slurp(dir / "a" / "rmse_ci_1bs.csv");
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir / "b" / "rmse_ci_1bs.csv"));
    CHECK(slurp(dir / "a" / "trace_ci_1bs_0.csv") == slurp(dir / "b" / "trace_ci_1bs_0.csv"));
    CHECK(a.rfind("# pmldpe scenario=ci_1bs config_hash=", 0) == 0);
    CHECK(a.find("master_seed=3") != std::string::npos);
    CHECK(a.find("t_s,estimator,rmse_m,trials\n") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("spectrum and validate")
{
    const auto dir = std::filesystem::temp_directory_path() / "pmldpe_cli_spectrum";
    std::string out, err;
    REQUIRE(run({"spectrum", "--scenario", preset, "--out", dir.string(), "--step", "2"}, out, err) == 0);
    CHECK(std::filesystem::exists(dir / "spectrum_ci_1bs_2.csv"));
    CHECK(run({"spectrum", "--scenario", preset, "--out", dir.string(), "--step", "999"}, out, err) == 1);
    std::filesystem::remove_all(dir);

    REQUIRE(run({"validate"}, out, err) == 0);
    CHECK(out.find("FAIL") == std::string::npos);
}

TEST_CASE("default output directory")
{
    ::setenv("PMLDPE_OUT_DIR", "/tmp/somewhere", 1);
    CHECK(default_out_dir() == "/tmp/somewhere");
    ::unsetenv("PMLDPE_OUT_DIR");
    CHECK(default_out_dir() == "results");
}
