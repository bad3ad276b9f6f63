#include "fuseplan/report.hpp"

#include <json.hpp>
#include <sstream>

#include "fuseplan/shape_inference.hpp"

namespace fuseplan {

namespace {

using nlohmann::json;

json eval_to_json(const EvalResult& r) {
    json j;
    j["energy_pj"] = r.energy_pj;
    j["cycles"] = r.cycles;
    j["edp_pj_s"] = r.edp_pj_s;
    j["compute_cycles"] = r.compute_cycles;
    j["memory_cycles"] = r.memory_cycles;
    j["mac_count"] = r.mac_count;
    j["pj_per_mac"] = r.pj_per_mac;
    j["offload_events"] = r.offload_events;
    j["dram"] = {
        {"input_act_read_bytes", r.dram.input_act_read_bytes},
        {"weight_read_bytes", r.dram.weight_read_bytes},
        {"spill_read_bytes", r.dram.spill_read_bytes},
        {"output_act_write_bytes", r.dram.output_act_write_bytes},
        {"spill_write_bytes", r.dram.spill_write_bytes},
        {"total_bytes", r.dram.total_bytes()},
    };
    j["on_chip"] = {
        {"activation_buffer_bytes", r.on_chip.activation_buffer_bytes},
        {"weight_buffer_bytes", r.on_chip.weight_buffer_bytes},
        {"scratchpad_bytes", r.on_chip.scratchpad_bytes},
    };
    return j;
}

json history_record(const GenerationRecord& rec) {
    return {{"generation", rec.generation},
            {"best_fitness", rec.best_fitness},
            {"mean_fitness", rec.mean_fitness},
            {"best_objective_value", rec.best_objective_value}};
}

}  // namespace

ScheduleReport build_schedule_report(const ModelGraph& graph, const ShapeMap& shapes,
                                     const ArchConfig& arch, const GaParams& params,
                                     const GaResult& ga) {
    ScheduleReport rep;
    rep.workload = graph.name();
    rep.arch_name = arch.name;
    rep.params = params;
    rep.baseline = evaluate_layerwise(graph, shapes, arch);
    rep.best = ga.best_eval;
    rep.ratio_energy = rep.baseline.energy_pj / rep.best.energy_pj;
    rep.ratio_cycles = static_cast<double>(rep.baseline.cycles) / static_cast<double>(rep.best.cycles);
    rep.ratio_edp = rep.baseline.edp_pj_s / rep.best.edp_pj_s;
    rep.best_fitness = ga.best_fitness;
    rep.fused_edges = fused_edge_pairs(graph, ga.best_genome);
    rep.history = ga.history;
    rep.evaluation_count = ga.evaluation_count;

    ScheduleEvaluation detail = evaluate_schedule_detailed(graph, shapes, ga.best_genome, arch);
    for (std::size_t i = 0; i < detail.groups.size(); ++i) {
        GroupReportEntry entry;
        entry.index = i;
        for (std::size_t m : detail.groups[i].members)
            entry.layer_ids.push_back(graph.layer(m).id);
        entry.tile_h = detail.plans[i].sink_tile_h;
        entry.tile_w = detail.plans[i].sink_tile_w;
        entry.passes = detail.plans[i].passes;
        entry.weights_fit = detail.weights_fit[i] != 0;
        entry.eval = detail.per_group[i];
        rep.groups.push_back(std::move(entry));
    }
    return rep;
}

std::string report_to_json(const ScheduleReport& rep) {
    json j;
    j["workload"] = rep.workload;
    j["arch"] = rep.arch_name;
    j["params"] = {
        {"population_size", rep.params.population_size},
        {"elite_count", rep.params.elite_count},
        {"random_survivors", rep.params.random_survivors},
        {"generations", rep.params.generations},
        {"mutations_per_individual", rep.params.mutations_per_individual},
        {"seed", rep.params.seed},
        {"objective", to_string(rep.params.objective)},
    };
    j["baseline"] = eval_to_json(rep.baseline);
    j["best"] = eval_to_json(rep.best);
    j["improvement"] = {
        {"energy", rep.ratio_energy},
        {"cycles", rep.ratio_cycles},
        {"edp", rep.ratio_edp},
    };
    j["best_fitness"] = rep.best_fitness;
    j["offload_events"] = {{"baseline", rep.baseline.offload_events},
                           {"best", rep.best.offload_events}};

    json fused = json::array();
    for (const auto& [from, to] : rep.fused_edges) fused.push_back({from, to});
    j["fused_edges"] = fused;

    json groups = json::array();
    for (const GroupReportEntry& g : rep.groups) {
        json jg;
        jg["index"] = g.index;
        jg["layers"] = g.layer_ids;
        jg["tile"] = {{"h", g.tile_h}, {"w", g.tile_w}};
        jg["passes"] = g.passes;
        jg["weights_fit"] = g.weights_fit;
        jg["eval"] = eval_to_json(g.eval);
        groups.push_back(jg);
    }
    j["groups"] = groups;

    json hist = json::array();
    for (const GenerationRecord& rec : rep.history) hist.push_back(history_record(rec));
    j["history"] = hist;
    j["evaluation_count"] = rep.evaluation_count;
    return j.dump(2) + "\n";
}

std::string report_to_csv(const ScheduleReport& rep) {
    std::ostringstream out;
    out << "metric,baseline,best,ratio\n";
    auto row = [&](const char* name, double b, double v) {
        out << name << ',' << json(b).dump() << ',' << json(v).dump() << ','
            << json(v != 0.0 ? b / v : 0.0).dump() << '\n';
    };
    row("energy_pj", rep.baseline.energy_pj, rep.best.energy_pj);
    row("cycles", static_cast<double>(rep.baseline.cycles), static_cast<double>(rep.best.cycles));
    row("edp_pj_s", rep.baseline.edp_pj_s, rep.best.edp_pj_s);
    row("dram_total_bytes", static_cast<double>(rep.baseline.dram.total_bytes()),
        static_cast<double>(rep.best.dram.total_bytes()));
    row("offload_events", static_cast<double>(rep.baseline.offload_events),
        static_cast<double>(rep.best.offload_events));
    return out.str();
}

std::string ga_log_jsonl(const std::vector<GenerationRecord>& history) {
    std::ostringstream out;
    for (const GenerationRecord& rec : history) out << history_record(rec).dump() << '\n';
    return out.str();
}

std::vector<SweepRow> run_buffer_sweep(const ModelGraph& graph, const ShapeMap& shapes,
                                       const ArchConfig& base_arch, const GaParams& params,
                                       int64_t step_bytes, int steps) {
    if (step_bytes < 0) throw std::invalid_argument("step_bytes must be >= 0");
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");
    constexpr int64_t kMinBuffer = 16 * 1024;

    std::vector<SweepRow> rows;
    for (int k = -steps; k <= steps; ++k) {
        int64_t shift = static_cast<int64_t>(k) * step_bytes;
        ArchConfig arch = base_arch;
        arch.name = base_arch.name;
        arch.activation_buffer_bytes = base_arch.activation_buffer_bytes + shift;
        arch.weight_buffer_bytes = base_arch.weight_buffer_bytes - shift;
        if (arch.activation_buffer_bytes < kMinBuffer || arch.weight_buffer_bytes < kMinBuffer)
            throw std::invalid_argument("sweep step exhausts a buffer (both must stay >= 16 KiB)");

        GaResult ga = run_ga(graph, shapes, arch, params);
        SweepRow row;
        row.activation_buffer_bytes = arch.activation_buffer_bytes;
        row.weight_buffer_bytes = arch.weight_buffer_bytes;
        row.energy_pj = ga.best_eval.energy_pj;
        row.cycles = ga.best_eval.cycles;
        row.edp_pj_s = ga.best_eval.edp_pj_s;
        row.best_fitness = ga.best_fitness;
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_to_json(const std::string& workload, const std::string& arch_name,
                          const std::vector<SweepRow>& rows) {
    json j;
    j["workload"] = workload;
    j["arch"] = arch_name;
    json jr = json::array();
    for (const SweepRow& r : rows) {
        jr.push_back({
            {"activation_kib", static_cast<double>(r.activation_buffer_bytes) / 1024.0},
            {"weight_kib", static_cast<double>(r.weight_buffer_bytes) / 1024.0},
            {"energy_pj", r.energy_pj},
            {"cycles", r.cycles},
            {"edp_pj_s", r.edp_pj_s},
            {"best_fitness", r.best_fitness},
        });
    }
    j["rows"] = jr;
    return j.dump(2) + "\n";
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "activation_kib,weight_kib,energy_pj,cycles,edp_pj_s,best_fitness\n";
    for (const SweepRow& r : rows) {
        out << json(static_cast<double>(r.activation_buffer_bytes) / 1024.0).dump() << ','
            << json(static_cast<double>(r.weight_buffer_bytes) / 1024.0).dump() << ','
            << json(r.energy_pj).dump() << ',' << r.cycles << ',' << json(r.edp_pj_s).dump()
            << ',' << json(r.best_fitness).dump() << '\n';
    }
    return out.str();
}

namespace {

json capacities_json() {
    json caps = json::object();
    for (const std::string& name : arch_preset_names()) {
        ArchConfig a = arch_preset(name);
        caps[name] = {{"activation_buffer_bytes", a.activation_buffer_bytes},
                      {"weight_buffer_bytes", a.weight_buffer_bytes}};
    }
    return caps;
}

}  // namespace

std::string footprints_to_json(const ModelGraph& graph, const ShapeMap& shapes) {
    json j;
    j["workload"] = graph.name();
    json rows = json::array();
    for (const FootprintRow& row : activation_footprints(graph, shapes)) {
        rows.push_back({{"index", row.node},
                        {"layer", graph.layer(row.node).id},
                        {"kind", to_string(graph.layer(row.node).kind)},
                        {"input_bytes", row.input_bytes},
                        {"output_bytes", row.output_bytes}});
    }
    j["layers"] = rows;
    j["capacities"] = capacities_json();
    return j.dump(2) + "\n";
}

std::string footprints_to_csv(const ModelGraph& graph, const ShapeMap& shapes) {
    std::ostringstream out;
    for (const std::string& name : arch_preset_names())
        out << "# activation_capacity_bytes " << name << ' '
            << arch_preset(name).activation_buffer_bytes << '\n';
    out << "index,layer,kind,input_bytes,output_bytes\n";
    for (const FootprintRow& row : activation_footprints(graph, shapes)) {
        out << row.node << ',' << graph.layer(row.node).id << ','
            << to_string(graph.layer(row.node).kind) << ',' << row.input_bytes << ','
            << row.output_bytes << '\n';
    }
    return out.str();
}

std::string presets_to_json() {
    json j = json::array();
    for (const std::string& name : arch_preset_names())
        j.push_back(json::parse(serialize_arch(arch_preset(name))));
    return j.dump(2) + "\n";
}

std::string presets_to_csv() {
    std::ostringstream out;
    out << "name,pe_x,pe_y,macs_per_pe,activation_buffer_kib,weight_buffer_kib,clock_hz,"
           "dram_bytes_per_sec\n";
    for (const std::string& name : arch_preset_names()) {
        ArchConfig a = arch_preset(name);
        out << a.name << ',' << a.pe_x << ',' << a.pe_y << ',' << a.macs_per_pe << ','
            << a.activation_buffer_bytes / 1024 << ',' << a.weight_buffer_bytes / 1024 << ','
            << json(a.clock_hz).dump() << ',' << json(a.dram_bytes_per_sec).dump() << '\n';
    }
    return out.str();
}

}  // namespace fuseplan
