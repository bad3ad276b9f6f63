#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fuseplan/descriptor.hpp"
#include "fuseplan/report.hpp"
#include "fuseplan/workloads.hpp"

namespace {

using namespace fuseplan;

constexpr int kExitUsage = 1;        // parse / validation failures
constexpr int kExitUnschedulable = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ModelGraph load_workload(const std::string& spec) {
    if (is_bundled_workload(spec)) return parse_model(bundled_workload(spec));
    return parse_model(read_file(spec));
}

ArchConfig load_arch(const std::string& spec) {
    if (is_arch_preset(spec)) return arch_preset(spec);
    return parse_arch(read_file(spec));
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ParseError("cannot open output file: " + out_path);
    out << text;
}

struct CommonOpts {
    std::string workload;
    std::string arch = "simba";
    std::string out;
    std::string format = "json";
    GaParams params;
    std::string objective = "edp";
};

void add_ga_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--workload", opts.workload,
                    "bundled workload name or descriptor file path")
        ->required();
    cmd->add_option("--arch", opts.arch, "arch preset name or arch JSON file path");
    cmd->add_option("--seed", opts.params.seed, "rng seed");
    cmd->add_option("--population", opts.params.population_size, "population size P");
    cmd->add_option("--elites", opts.params.elite_count, "elite survivors N per generation");
    cmd->add_option("--random-survivors", opts.params.random_survivors,
                    "random survivors per generation");
    cmd->add_option("--generations", opts.params.generations, "generations G");
    cmd->add_option("--mutations", opts.params.mutations_per_individual,
                    "mutations per individual per generation");
    cmd->add_option("--objective", opts.objective, "edp | energy | cycles | dram_bytes");
    cmd->add_option("--out", opts.out, "write output to a file instead of stdout");
    cmd->add_option("--format", opts.format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fuseplan: fused-layer schedule optimization for edge CNN accelerators"};
    app.require_subcommand(1);

    CommonOpts run_opts;
    CLI::App* run = app.add_subcommand("run", "optimize a schedule and emit a report");
    add_ga_flags(run, run_opts);
    std::string ga_log_path;
    run->add_option("--ga-log", ga_log_path, "write per-generation JSONL log to a file");

    CommonOpts sweep_opts;
    int64_t step_kib = 16;
    int sweep_steps = 4;
    CLI::App* sweep = app.add_subcommand(
        "sweep-ratio", "trade activation buffer capacity against weight buffer capacity");
    add_ga_flags(sweep, sweep_opts);
    sweep->add_option("--step-kib", step_kib, "KiB shifted per sweep step");
    sweep->add_option("--steps", sweep_steps, "steps in each direction");

    std::string fp_workload, fp_out, fp_format = "json";
    CLI::App* footprints =
        app.add_subcommand("footprints", "per-layer activation footprint table");
    footprints->add_option("--workload", fp_workload, "bundled workload name or file path")
        ->required();
    footprints->add_option("--out", fp_out, "write output to a file instead of stdout");
    footprints->add_option("--format", fp_format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));

    std::string presets_out, presets_format = "json";
    CLI::App* presets = app.add_subcommand("presets", "print the bundled arch presets");
    presets->add_option("--out", presets_out, "write output to a file instead of stdout");
    presets->add_option("--format", presets_format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            run_opts.params.objective = objective_from_string(run_opts.objective);
            ModelGraph graph = load_workload(run_opts.workload);
            ShapeMap shapes = infer_shapes(graph);
            ArchConfig arch = load_arch(run_opts.arch);
            GaResult ga = run_ga(graph, shapes, arch, run_opts.params);
            ScheduleReport report =
                build_schedule_report(graph, shapes, arch, run_opts.params, ga);
            if (!ga_log_path.empty()) emit(ga_log_jsonl(ga.history), ga_log_path);
            emit(run_opts.format == "csv" ? report_to_csv(report) : report_to_json(report),
                 run_opts.out);
        } else if (sweep->parsed()) {
            sweep_opts.params.objective = objective_from_string(sweep_opts.objective);
            ModelGraph graph = load_workload(sweep_opts.workload);
            ShapeMap shapes = infer_shapes(graph);
            ArchConfig arch = load_arch(sweep_opts.arch);
            auto rows = run_buffer_sweep(graph, shapes, arch, sweep_opts.params,
                                         step_kib * 1024, sweep_steps);
            emit(sweep_opts.format == "csv"
                     ? sweep_to_csv(rows)
                     : sweep_to_json(graph.name(), arch.name, rows),
                 sweep_opts.out);
        } else if (footprints->parsed()) {
            ModelGraph graph = load_workload(fp_workload);
            ShapeMap shapes = infer_shapes(graph);
            emit(fp_format == "csv" ? footprints_to_csv(graph, shapes)
                                    : footprints_to_json(graph, shapes),
                 fp_out);
        } else if (presets->parsed()) {
            emit(presets_format == "csv" ? presets_to_csv() : presets_to_json(), presets_out);
        }
    } catch (const UnschedulableError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUnschedulable;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return 0;
}
