#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hyswitch/cli.hpp"

using namespace hyswitch;
namespace fs = std::filesystem;

namespace {

const char* kCrossingModel = R"("model": {
    "fitness": [[1.0, 1.0], [0.7, 1.1], [1.1, 0.7]],
    "generator": {"type": "constant", "matrix": [[-1.0, 1.0], [1.0, -1.0]]}
  })";

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() / ("hyswitch-cli-" + std::to_string(counter()++));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }
    static int& counter() {
        static int n = 0;
        return n;
    }

    std::string write(const std::string& name, const std::string& text) const {
        const auto p = dir / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string read(const std::string& name) const {
        std::ifstream f(dir / "out" / name);
        std::stringstream s;
        s << f.rdbuf();
        return s.str();
    }
};

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "hyswitch");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> data_rows(const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#')
            rows.push_back(line);
    return rows;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string cell;
    while (std::getline(in, cell, ','))
        out.push_back(cell);
    return out;
}

} // namespace

TEST_CASE("validate exit codes") {
    Sandbox box;
    const auto good = box.write("good.json", std::string("{") + kCrossingModel + "}");
    auto r = run({"validate", "--config", good});
    CHECK(r.code == 0);
    CHECK(r.out.find("valid") != std::string::npos);

    const auto bad = box.write("bad.json", R"({"model": {"fitness": [[1.0, 0.8], [0.8, 1.0]],
        "generator": {"type": "constant", "matrix": [[-1.0, 2.0], [1.0, -1.0]]}}})");
    r = run({"validate", "--config", bad});
    CHECK(r.code == 2);
    CHECK(r.out.find("q-property violated at row 1") != std::string::npos);

    r = run({"validate", "--config", (box.dir / "missing.json").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("cannot read") != std::string::npos);

    const auto garbage = box.write("garbage.json", "{ not json");
    CHECK(run({"validate", "--config", garbage}).code == 1);
}

TEST_CASE("config schema errors are validation errors") {
    Sandbox box;
    const auto cfg = box.write("c.json", std::string("{") + kCrossingModel +
                                             R"(, "experiment": {"kind": "simulate", "dt": -1}})");
    CHECK(run({"simulate", "--config", cfg}).code == 2);
    const auto unknown = box.write("u.json", std::string("{") + kCrossingModel +
                                                 R"(, "experiment": {"kind": "simulate", "bogus": 1}})");
    CHECK(run({"simulate", "--config", unknown}).code == 2);
}

TEST_CASE("simulate writes a trajectory whose regime changes only on jump rows") {
    Sandbox box;
    const auto cfg = box.write("s.json", std::string("{") + kCrossingModel + R"(,
        "experiment": {"kind": "simulate", "t_end": 30, "initial_state": [0.3, 0.3, 0.4]},
        "seed": 5})");
    const auto r = run({"run", "--config", cfg, "--out", (box.dir / "out").string()});
    REQUIRE(r.code == 0);
    const auto csv = box.read("trajectory.csv");
    CHECK(csv.rfind("# tool=hyswitch", 0) == 0);
    CHECK(csv.find("# seed=5") != std::string::npos);
    const auto rows = data_rows(csv);
    REQUIRE(rows.size() > 2);
    CHECK(rows[0] == "t,regime,P_1,P_2,P_3,jump");
    int jumps = 0;
    std::string prev;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cells = split(rows[i]);
        REQUIRE(cells.size() == 6);
        if (i > 1)
            CHECK((cells[1] != prev) == (cells[5] == "1"));
        jumps += cells[5] == "1";
        prev = cells[1];
    }
    CHECK(jumps > 0);
    const auto summary = box.read("summary.json");
    CHECK(summary.find("\"fingerprint\"") != std::string::npos);
    CHECK(summary.find("\"jump_count\": " + std::to_string(jumps)) != std::string::npos);
}

TEST_CASE("single-environment trajectory keeps one regime") {
    Sandbox box;
    const auto cfg = box.write("s.json", R"({"model": {"fitness": [[1.0], [0.7]],
        "generator": {"type": "constant", "matrix": [[0.0]]}},
        "experiment": {"kind": "simulate", "t_end": 5}})");
    REQUIRE(run({"simulate", "--config", cfg, "--out", (box.dir / "out").string()}).code == 0);
    const auto rows = data_rows(box.read("trajectory.csv"));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(split(rows[i])[1] == "1");
        CHECK(split(rows[i])[4] == "0");
    }
}

TEST_CASE("state-dependent simulation fixes at the dominant start") {
    Sandbox box;
    const auto cfg = box.write("q1.json", R"({"model": {"fitness": [[1.0, 0.8], [0.8, 1.0]],
        "generator": {"type": "affine", "basis": [[[0, 0], [1, -1]], [[-1, 1], [0, 0]]]}},
        "experiment": {"kind": "simulate", "initial_state": [0.9, 0.1]}, "seed": 3})");
    const auto r = run({"simulate", "--config", cfg, "--out", (box.dir / "out").string()});
    CHECK(r.code == 0);
    CHECK(box.read("summary.json").find("\"outcome\": \"fixation:1\"") != std::string::npos);
}

TEST_CASE("ensemble outputs") {
    Sandbox box;
    const auto cfg = box.write("e.json", std::string("{") + kCrossingModel + R"(,
        "experiment": {"kind": "ensemble", "runs": 1, "t_end": 10}, "seed": 2})");
    REQUIRE(run({"ensemble", "--config", cfg, "--out", (box.dir / "out").string()}).code == 0);
    const auto rows = data_rows(box.read("outcomes.csv"));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "run,seed,outcome,final_dist,jumps");
    CHECK(split(rows[1]).size() == 5);
    const auto j = Json::parse(box.read("ensemble.json"));
    CHECK(j["parameters"]["runs"] == 1);
    CHECK(j["polymorphic"]["std_error"] == 0.0);
}

TEST_CASE("certify exit codes") {
    Sandbox box;
    const auto crossing = box.write("f.json", std::string("{") + kCrossingModel + R"(,
        "experiment": {"kind": "certify", "samples": 2000}})");
    auto r = run({"certify", "--config", crossing, "--out", (box.dir / "out").string()});
    CHECK(r.code == 0);
    const auto doc = Json::parse(box.read("certificates.json"));
    CHECK(doc["certificates"].size() == 3);

    const auto tie = box.write("t.json", R"({"model": {"fitness": [[1.0, 1.0], [0.7, 1.1], [1.1, 0.7]],
        "generator": {"type": "constant", "matrix": [[-3.0, 3.0], [1.0, -1.0]]}},
        "experiment": {"kind": "certify"}})");
    r = run({"certify", "--config", tie, "--out", (box.dir / "tie").string()});
    CHECK(r.code == 4);
    CHECK(r.err.find("1, 2") != std::string::npos);

    const auto reducible = box.write("r.json", R"({"model": {"fitness": [[1.0, 1.0], [0.7, 1.1]],
        "generator": {"type": "constant", "matrix": [[0.0, 0.0], [1.0, -1.0]]}},
        "experiment": {"kind": "certify"}})");
    r = run({"certify", "--config", reducible, "--out", (box.dir / "red").string()});
    CHECK(r.code == 4);
    CHECK(r.err.find("reducible") != std::string::npos);
}

TEST_CASE("partition reports the crossing boundaries") {
    Sandbox box;
    const auto cfg = box.write("p.json", std::string("{") + kCrossingModel + R"(,
        "experiment": {"kind": "partition", "grid_resolution": 1000}})");
    const auto r = run({"partition", "--config", cfg, "--out", (box.dir / "out").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("boundary q=0.250000000") != std::string::npos);
    CHECK(r.out.find("boundary q=0.750000000") != std::string::npos);
    const auto rows = data_rows(box.read("partition.csv"));
    CHECK(rows[0] == "q,mean_1,mean_2,mean_3,winner");
    CHECK(rows.size() == 1002);
}

TEST_CASE("reruns are byte-identical") {
    Sandbox box;
    const auto cfg = box.write("e.json", std::string("{") + kCrossingModel + R"(,
        "experiment": {"kind": "ensemble", "runs": 20, "t_end": 20, "start": {"type": "near_vertex", "vertex": 2, "delta": 0.01},
                       "escape": {"target": 2, "r": 0.2}, "deltas": [0.05, 0.01]}, "seed": 4})");
    REQUIRE(run({"run", "--config", cfg, "--out", (box.dir / "a").string()}).code == 0);
    REQUIRE(run({"run", "--config", cfg, "--out", (box.dir / "b").string()}).code == 0);
    for (const auto& name : {"outcomes.csv", "curve.csv", "ensemble.json"}) {
        std::ifstream fa(box.dir / "a" / name), fb(box.dir / "b" / name);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        CHECK(!sa.str().empty());
        CHECK(sa.str() == sb.str());
    }
}
