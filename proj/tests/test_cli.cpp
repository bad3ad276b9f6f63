#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#ifndef FUSEPLAN_CLI_PATH
#error "FUSEPLAN_CLI_PATH must point at the fuseplan binary"
#endif

namespace {

using nlohmann::json;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    std::string out_path = "cli_stdout_" + std::to_string(counter) + ".txt";
    std::string err_path = "cli_stderr_" + std::to_string(counter) + ".txt";
    ++counter;
    std::string cmd = std::string(FUSEPLAN_CLI_PATH) + " " + args + " > " + out_path + " 2> " +
                      err_path;
    int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

const char* kSingleLayer = R"({
    "name": "single",
    "inputs": {"a": [3, 16, 16]},
    "layers": [{"id": "a", "kind": "conv", "kernel": [3,3], "pad": [1,1], "out_channels": 8}],
    "edges": []
})";

}  // namespace

TEST_CASE("run: single-layer workload reports ratios of exactly 1.0") {
    spit("single.json", kSingleLayer);
    CliResult r = run_cli("run --workload single.json --arch simba --generations 5 "
                          "--population 8 --elites 2 --random-survivors 1 --seed 1");
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.out);
    CHECK(rep["improvement"]["energy"] == 1.0);
    CHECK(rep["improvement"]["cycles"] == 1.0);
    CHECK(rep["improvement"]["edp"] == 1.0);
    CHECK(rep["best_fitness"] == 1.0);
    CHECK(rep["fused_edges"].empty());
}

TEST_CASE("run: report is self-consistent and covers every layer once") {
    CliResult r = run_cli("run --workload chain8 --arch simba --generations 40 "
                          "--population 20 --seed 11");
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.out);

    double base_energy = rep["baseline"]["energy_pj"];
    double best_energy = rep["best"]["energy_pj"];
    CHECK(rep["improvement"]["energy"] == doctest::Approx(base_energy / best_energy).epsilon(1e-12));
    double base_edp = rep["baseline"]["edp_pj_s"];
    double best_edp = rep["best"]["edp_pj_s"];
    CHECK(rep["improvement"]["edp"] == doctest::Approx(base_edp / best_edp).epsilon(1e-12));

    std::set<std::string> seen;
    std::size_t total = 0;
    for (const json& g : rep["groups"])
        for (const json& layer : g["layers"]) {
            seen.insert(layer.get<std::string>());
            ++total;
        }
    CHECK(total == 8);
    CHECK(seen.size() == 8);

    // Per-group energies sum to the best schedule's energy.
    double group_energy = 0.0;
    for (const json& g : rep["groups"]) group_energy += g["eval"]["energy_pj"].get<double>();
    CHECK(group_energy == doctest::Approx(best_energy).epsilon(1e-9));

    CHECK(rep["history"].size() == 41);
}

TEST_CASE("run: identical flags and seed produce byte-identical reports") {
    std::string flags = "run --workload chain8 --arch simba2x2 --generations 25 --population 16 "
                        "--seed 99 --out ";
    CliResult a = run_cli(flags + "rep_a.json");
    CliResult b = run_cli(flags + "rep_b.json");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    std::string ra = slurp("rep_a.json"), rb = slurp("rep_b.json");
    CHECK(ra == rb);
    CHECK_FALSE(ra.empty());
    std::remove("rep_a.json");
    std::remove("rep_b.json");
}

TEST_CASE("run: bad arch field exits 1 with a named-field diagnostic") {
    spit("bad_arch.json", R"({"name": "x", "pe_x": 4, "pe_y": 4, "maks_per_pe": 64})");
    CliResult r = run_cli("run --workload chain4 --arch bad_arch.json --generations 2 "
                          "--population 4 --elites 1 --random-survivors 1");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("maks_per_pe") != std::string::npos);
    std::remove("bad_arch.json");

    spit("neg_arch.json", R"({"name": "x", "pe_x": 4, "pe_y": 4, "macs_per_pe": 64,
        "activation_buffer_bytes": -5, "weight_buffer_bytes": 1024})");
    CliResult r2 = run_cli("run --workload chain4 --arch neg_arch.json --generations 2 "
                           "--population 4 --elites 1 --random-survivors 1");
    CHECK(r2.exit_code == 1);
    CHECK(r2.err.find("activation_buffer_bytes") != std::string::npos);
    std::remove("neg_arch.json");
}

TEST_CASE("run: unschedulable workload exits 2") {
    spit("huge.json", R"({
        "name": "huge",
        "inputs": {"a": [64, 64, 64]},
        "layers": [{"id": "a", "kind": "conv", "kernel": [5,5], "pad": [2,2], "out_channels": 64}],
        "edges": []
    })");
    spit("tiny_arch.json", R"({"name": "tiny", "pe_x": 2, "pe_y": 2, "macs_per_pe": 1,
        "activation_buffer_bytes": 1024, "weight_buffer_bytes": 65536})");
    CliResult r = run_cli("run --workload huge.json --arch tiny_arch.json --generations 2 "
                          "--population 4 --elites 1 --random-survivors 1");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("activation buffer") != std::string::npos);
    std::remove("huge.json");
    std::remove("tiny_arch.json");
}

TEST_CASE("run: csv format emits the metric table") {
    CliResult r = run_cli("run --workload chain4 --arch simba --generations 10 --population 8 "
                          "--elites 2 --seed 5 --format csv");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("metric,baseline,best,ratio\n", 0) == 0);
    CHECK(r.out.find("energy_pj,") != std::string::npos);
    CHECK(r.out.find("offload_events,") != std::string::npos);
}

TEST_CASE("run: --ga-log writes one JSONL record per generation") {
    CliResult r = run_cli("run --workload chain4 --arch simba --generations 12 --population 8 "
                          "--elites 2 --seed 5 --ga-log ga_log.jsonl --out run_rep.json");
    REQUIRE(r.exit_code == 0);
    std::string log = slurp("ga_log.jsonl");
    int lines = 0;
    std::istringstream in(log);
    std::string line;
    double prev_best = 0.0;
    while (std::getline(in, line)) {
        json rec = json::parse(line);
        CHECK(rec["generation"] == lines);
        CHECK(rec["best_fitness"].get<double>() >= prev_best);
        prev_best = rec["best_fitness"];
        CHECK(rec.contains("mean_fitness"));
        CHECK(rec.contains("best_objective_value"));
        ++lines;
    }
    CHECK(lines == 13);  // generation 0 baseline + 12
    std::remove("ga_log.jsonl");
    std::remove("run_rep.json");
}

TEST_CASE("sweep-ratio: conserves total bytes; step 0 equals a plain run") {
    CliResult sweep = run_cli("sweep-ratio --workload chain8 --arch eyeriss --generations 10 "
                              "--population 8 --elites 2 --seed 3 --step-kib 16 --steps 2");
    REQUIRE(sweep.exit_code == 0);
    json rows = json::parse(sweep.out)["rows"];
    REQUIRE(rows.size() == 5);
    double total = rows[0]["activation_kib"].get<double>() + rows[0]["weight_kib"].get<double>();
    for (const json& row : rows)
        CHECK(row["activation_kib"].get<double>() + row["weight_kib"].get<double>() == total);

    CliResult zero = run_cli("sweep-ratio --workload chain8 --arch eyeriss --generations 10 "
                             "--population 8 --elites 2 --seed 3 --steps 0");
    REQUIRE(zero.exit_code == 0);
    json zrows = json::parse(zero.out)["rows"];
    REQUIRE(zrows.size() == 1);

    CliResult run = run_cli("run --workload chain8 --arch eyeriss --generations 10 "
                            "--population 8 --elites 2 --seed 3");
    json rep = json::parse(run.out);
    CHECK(zrows[0]["energy_pj"].get<double>() == rep["best"]["energy_pj"].get<double>());
    CHECK(zrows[0]["cycles"].get<int64_t>() == rep["best"]["cycles"].get<int64_t>());
    CHECK(zrows[0]["edp_pj_s"].get<double>() == rep["best"]["edp_pj_s"].get<double>());
}

TEST_CASE("sweep-ratio: exhausting a buffer is rejected") {
    CliResult r = run_cli("sweep-ratio --workload chain4 --arch simba --generations 2 "
                          "--population 4 --elites 1 --step-kib 16 --steps 4");
    // simba's activation buffer is 64 KiB; -4 steps would hit 0 KiB.
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("16 KiB") != std::string::npos);
}

TEST_CASE("footprints: unet encoder/decoder footprints fall then rise") {
    CliResult r = run_cli("footprints --workload unet_small");
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.out);
    REQUIRE(rep["layers"].size() > 20);
    CHECK(rep["capacities"].contains("eyeriss"));

    // Compare the first encoder conv, the bottleneck, and the last decoder
    // conv output footprints: rise -> fall -> rise.
    auto output_bytes = [&](const std::string& id) -> int64_t {
        for (const json& row : rep["layers"])
            if (row["layer"] == id) return row["output_bytes"].get<int64_t>();
        FAIL("layer not found: " << id);
        return 0;
    };
    int64_t enc = output_bytes("enc1_conv2");
    int64_t mid = output_bytes("mid_conv2");
    int64_t dec = output_bytes("dec1_conv2");
    CHECK(enc > mid);
    CHECK(dec > mid);
}

TEST_CASE("footprints: resnet50 has 50+ rows, early rows above every preset capacity") {
    CliResult r = run_cli("footprints --workload resnet50");
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.out);
    REQUIRE(rep["layers"].size() > 50);
    int64_t max_cap = 0;
    for (const auto& [name, cap] : rep["capacities"].items())
        max_cap = std::max(max_cap, cap["activation_buffer_bytes"].get<int64_t>());
    CHECK(max_cap == 256 * 1024);
    int early_over = 0;
    for (std::size_t i = 0; i < 8; ++i)
        if (rep["layers"][i]["output_bytes"].get<int64_t>() > max_cap) ++early_over;
    CHECK(early_over >= 4);
}

TEST_CASE("footprints: single tiny layer reports a few bytes") {
    spit("tiny.json", R"({
        "name": "tiny",
        "inputs": {"a": [1, 1, 1]},
        "layers": [{"id": "a", "kind": "pointwise_conv", "out_channels": 1}],
        "edges": []
    })");
    CliResult r = run_cli("footprints --workload tiny.json --format csv");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("a,pointwise_conv,1,1") != std::string::npos);
    std::remove("tiny.json");
}

TEST_CASE("presets: Table 1 configurations are printed") {
    CliResult r = run_cli("presets");
    REQUIRE(r.exit_code == 0);
    json presets = json::parse(r.out);
    REQUIRE(presets.size() == 3);
    CHECK(presets[0]["name"] == "eyeriss");
    CHECK(presets[0]["pe_x"] == 14);
    CHECK(presets[0]["pe_y"] == 12);
    CHECK(presets[0]["macs_per_pe"] == 1);
    CHECK(presets[0]["activation_buffer_bytes"] == 128 * 1024);
    CHECK(presets[0]["weight_buffer_bytes"] == 512 * 1024);
    CHECK(presets[1]["name"] == "simba");
    CHECK(presets[1]["pe_x"] == 4);
    CHECK(presets[1]["macs_per_pe"] == 64);
    CHECK(presets[1]["activation_buffer_bytes"] == 64 * 1024);
    CHECK(presets[2]["name"] == "simba2x2");
    CHECK(presets[2]["pe_x"] == 8);
    CHECK(presets[2]["activation_buffer_bytes"] == 256 * 1024);
    CHECK(presets[2]["weight_buffer_bytes"] == 2048 * 1024);
    for (const json& p : presets) {
        CHECK(p["clock_hz"] == 200e6);
        CHECK(p["dram_bytes_per_sec"] == 128e9);
    }
}

TEST_CASE("unknown bundled workload exits 1") {
    CliResult r = run_cli("run --workload nonexistent_net --generations 2 --population 4 "
                          "--elites 1");
    CHECK(r.exit_code == 1);
    CHECK_FALSE(r.err.empty());
}
