#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fuseplan/model_graph.hpp"
#include "fuseplan/shape_inference.hpp"
#include "fuseplan/tile_plan.hpp"

namespace fuseplan {

struct ArchConfig;

/// One fused/split bit per activation edge, indexed like ModelGraph::edges().
/// A fused edge keeps its tensor on-chip; a split edge round-trips it
/// through DRAM. Genomes are immutable values; actions return new genomes.
struct FusionGenome {
    std::vector<char> fused;  // avoids vector<bool> proxy semantics

    static FusionGenome all_split(const ModelGraph& graph) {
        return FusionGenome{std::vector<char>(graph.edge_count(), 0)};
    }
    static FusionGenome all_fused(const ModelGraph& graph) {
        return FusionGenome{std::vector<char>(graph.edge_count(), 1)};
    }

    bool is_fused(std::size_t edge) const { return fused[edge] != 0; }
    std::size_t fused_count() const {
        std::size_t n = 0;
        for (char f : fused) n += (f != 0);
        return n;
    }

    friend bool operator==(const FusionGenome&, const FusionGenome&) = default;
};

/// A fused subgraph: a weakly connected, convex set of layers executed
/// back-to-back with intermediates held on-chip.
struct FusionGroup {
    std::size_t index = 0;
    std::vector<std::size_t> members;         // topological order
    std::vector<std::size_t> internal_edges;  // edge indices with both ends inside
    std::vector<std::size_t> in_edges;        // edges entering from other groups
    std::vector<std::size_t> out_edges;       // edges leaving to other groups
    std::vector<std::size_t> sinks;           // members with no in-group consumer
};

/// Raised when a genome's fused components do not form a convex partition
/// (the quotient graph of groups has a directed cycle).
class ConvexityError : public std::runtime_error {
  public:
    ConvexityError(std::size_t node_a, std::size_t node_b, const std::string& what)
        : std::runtime_error(what), node_a(node_a), node_b(node_b) {}
    std::size_t node_a;
    std::size_t node_b;
};

/// Groups = weakly connected components over fused edges (isolated nodes are
/// singletons), ordered topologically over the quotient DAG. Throws
/// ConvexityError with an offending node pair if the quotient has a cycle.
std::vector<FusionGroup> derive_groups(const ModelGraph& graph, const FusionGenome& genome);

/// Group index per node for a derived grouping.
std::vector<std::size_t> group_of_nodes(const ModelGraph& graph,
                                        const std::vector<FusionGroup>& groups);

enum class ActionKind { combine, separate };

struct Action {
    ActionKind kind = ActionKind::combine;
    std::size_t edge = 0;
};

/// Flips exactly one edge bit. combine targets a split edge, separate a
/// fused one (anything else throws std::invalid_argument). Returns nullopt
/// if the flipped genome is not convex; callers retry with another edge.
std::optional<FusionGenome> apply_action(const ModelGraph& graph, const FusionGenome& genome,
                                         const Action& action);

/// A genome's scheduling feasibility on a concrete architecture.
struct GroupPlan {
    FusionGroup group;
    TilePlan plan;
    bool weights_fit = true;  // false: weights re-streamed from DRAM per pass
};

struct GenomeValidation {
    bool valid = false;
    std::string reason;  // first failed check when invalid
    std::vector<GroupPlan> group_plans;
};

/// Checks convexity, plans every group against the activation buffer, and
/// flags weight-buffer overflow (non-fatal). Invalid is a value, not an
/// error.
GenomeValidation validate(const ModelGraph& graph, const FusionGenome& genome,
                          const ArchConfig& arch, const ShapeMap& shapes);

/// Fused edge pairs as (producer id, consumer id), for reports.
std::vector<std::pair<std::string, std::string>> fused_edge_pairs(const ModelGraph& graph,
                                                                  const FusionGenome& genome);

}  // namespace fuseplan
