#pragma once

#include <string>
#include <vector>

#include "fuseplan/cost_model.hpp"
#include "fuseplan/ga.hpp"

namespace fuseplan {

struct GroupReportEntry {
    std::size_t index = 0;
    std::vector<std::string> layer_ids;  // topological order
    int64_t tile_h = 0;
    int64_t tile_w = 0;
    int64_t passes = 0;
    bool weights_fit = true;
    EvalResult eval;
};

/// Full result of one optimization run. Improvement ratios are
/// baseline/best per metric; the group listing covers every layer exactly
/// once.
struct ScheduleReport {
    std::string workload;
    std::string arch_name;
    GaParams params;
    EvalResult baseline;
    EvalResult best;
    double ratio_energy = 0.0;
    double ratio_cycles = 0.0;
    double ratio_edp = 0.0;
    double best_fitness = 0.0;
    std::vector<std::pair<std::string, std::string>> fused_edges;
    std::vector<GroupReportEntry> groups;
    std::vector<GenerationRecord> history;
    int64_t evaluation_count = 0;
};

ScheduleReport build_schedule_report(const ModelGraph& graph, const ShapeMap& shapes,
                                     const ArchConfig& arch, const GaParams& params,
                                     const GaResult& ga);

std::string report_to_json(const ScheduleReport& report);
std::string report_to_csv(const ScheduleReport& report);

/// One line-delimited JSON record per generation, for plotting.
std::string ga_log_jsonl(const std::vector<GenerationRecord>& history);

/// Iso-capacity buffer sweep: shifts bytes from the weight buffer into the
/// activation buffer (negative steps shift the other way) and re-runs the
/// optimization at the same seed for every point.
struct SweepRow {
    int64_t activation_buffer_bytes = 0;
    int64_t weight_buffer_bytes = 0;
    double energy_pj = 0.0;
    int64_t cycles = 0;
    double edp_pj_s = 0.0;
    double best_fitness = 0.0;
};

/// Rows for shifts of -steps..+steps times step_bytes. Both buffers must
/// stay >= 16 KiB at every point (std::invalid_argument otherwise).
std::vector<SweepRow> run_buffer_sweep(const ModelGraph& graph, const ShapeMap& shapes,
                                       const ArchConfig& base_arch, const GaParams& params,
                                       int64_t step_bytes, int steps);

std::string sweep_to_json(const std::string& workload, const std::string& arch_name,
                          const std::vector<SweepRow>& rows);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

/// Per-layer activation footprints with the bundled presets' activation
/// buffer capacities as reference lines.
std::string footprints_to_json(const ModelGraph& graph, const ShapeMap& shapes);
std::string footprints_to_csv(const ModelGraph& graph, const ShapeMap& shapes);

/// The bundled Table-1 presets.
std::string presets_to_json();
std::string presets_to_csv();

}  // namespace fuseplan
