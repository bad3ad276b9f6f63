#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fuseplan/arch.hpp"
#include "fuseplan/fusion_space.hpp"
#include "fuseplan/receptive_field.hpp"
#include "fuseplan/shape_inference.hpp"

namespace fuseplan {

/// DRAM bytes split by tensor class.
struct DramTraffic {
    int64_t input_act_read_bytes = 0;   // model input tensors
    int64_t weight_read_bytes = 0;
    int64_t spill_read_bytes = 0;       // intermediates re-read across groups
    int64_t output_act_write_bytes = 0; // model output tensors
    int64_t spill_write_bytes = 0;      // intermediates offloaded at group boundaries

    int64_t activation_bytes() const {
        return input_act_read_bytes + spill_read_bytes + output_act_write_bytes +
               spill_write_bytes;
    }
    int64_t total_read_bytes() const {
        return input_act_read_bytes + weight_read_bytes + spill_read_bytes;
    }
    int64_t total_write_bytes() const { return output_act_write_bytes + spill_write_bytes; }
    int64_t total_bytes() const { return total_read_bytes() + total_write_bytes(); }

    DramTraffic& operator+=(const DramTraffic& o);
};

/// On-chip access bytes (reads + writes) per memory level.
struct OnChipTraffic {
    int64_t activation_buffer_bytes = 0;
    int64_t weight_buffer_bytes = 0;
    int64_t scratchpad_bytes = 0;

    OnChipTraffic& operator+=(const OnChipTraffic& o);
};

/// Cost of executing a schedule (or one group of it).
struct EvalResult {
    double energy_pj = 0.0;
    int64_t cycles = 0;
    double edp_pj_s = 0.0;
    DramTraffic dram;
    OnChipTraffic on_chip;
    int64_t mac_count = 0;
    double pj_per_mac = 0.0;
    int64_t offload_events = 0;  // group-boundary activation writes to DRAM
    int64_t compute_cycles = 0;
    int64_t memory_cycles = 0;
};

/// Thrown when a schedule (or the layerwise baseline) cannot fit the
/// activation buffer even at a 1x1 sink tile.
class UnschedulableError : public std::runtime_error {
  public:
    explicit UnschedulableError(const std::string& what) : std::runtime_error(what) {}
};

/// MAC count of one layer: conv M*P*Q*C*R*S, depthwise C*P*Q*R*S, pointwise
/// M*P*Q*C; pools, adds and concats perform no MACs.
int64_t mac_count(const ModelGraph& graph, const ShapeMap& shapes, std::size_t node);

/// Evaluates one group as a standalone workload: its external feeds count as
/// model inputs and its outputs as model outputs.
EvalResult evaluate_group(const ModelGraph& graph, const ShapeMap& shapes,
                          const FusionGroup& group, const TilePlan& plan, const ArchConfig& arch);

/// Evaluates a full schedule: partitions the graph by the genome, plans each
/// group via max_tile_for_capacity, and sums group costs. Cross-group
/// activation edges pay one DRAM write at the producer group and one read
/// per consuming group. Groups execute sequentially. Throws ConvexityError
/// on a malformed genome and UnschedulableError on a capacity-infeasible
/// group.
EvalResult evaluate_schedule(const ModelGraph& graph, const ShapeMap& shapes,
                             const FusionGenome& genome, const ArchConfig& arch);

/// evaluate_schedule plus the per-group breakdown, for reports.
struct ScheduleEvaluation {
    EvalResult total;
    std::vector<FusionGroup> groups;
    std::vector<TilePlan> plans;
    std::vector<EvalResult> per_group;
    std::vector<char> weights_fit;
};

ScheduleEvaluation evaluate_schedule_detailed(const ModelGraph& graph, const ShapeMap& shapes,
                                              const FusionGenome& genome, const ArchConfig& arch);

/// The all-split baseline: every activation edge round-trips through DRAM.
EvalResult evaluate_layerwise(const ModelGraph& graph, const ShapeMap& shapes,
                              const ArchConfig& arch);

struct SweepPoint {
    Window tile;
    bool feasible = false;
    double pj_per_mac = 0.0;
    double energy_pj = 0.0;
};

/// Evaluates a group at explicit sink tiles, reporting energy per MAC.
/// Tiles whose footprint exceeds the activation buffer are marked
/// infeasible.
std::vector<SweepPoint> pj_per_mac_sweep(const ModelGraph& graph, const ShapeMap& shapes,
                                         const FusionGroup& group, const ArchConfig& arch,
                                         const std::vector<Window>& tiles);

}  // namespace fuseplan
