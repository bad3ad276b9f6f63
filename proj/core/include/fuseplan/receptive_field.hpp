#pragma once

#include <optional>

#include "fuseplan/arch.hpp"
#include "fuseplan/fusion_space.hpp"
#include "fuseplan/tile_plan.hpp"

namespace fuseplan {

/// Backtraces the receptive field of a sink output tile through a fused
/// group. Walking members in reverse topological order, each layer's
/// required output window is the max over its in-group consumers of
/// w_in = (w_out - 1) * stride + kernel per axis, clamped to that layer's
/// full feature-map extent (padding contributes virtual pixels only). Joins
/// propagate windows unchanged. Throws std::invalid_argument on an empty
/// group or a sink tile < 1x1.
TilePlan backtrace_window(const ModelGraph& graph, const ShapeMap& shapes,
                          const FusionGroup& group, Window sink_tile);

/// Activation-buffer bytes the plan occupies during one interior pass.
/// Cached bytes cover (kernel - stride)+ line-buffer rows per internal
/// tensor (shared across its in-group consumers, sized by the widest
/// demand) at full feature-map width; once cached, no intermediate element
/// is ever produced twice.
FootprintReport intermediate_footprint(const ModelGraph& graph, const ShapeMap& shapes,
                                       const FusionGroup& group, const TilePlan& plan);

/// Largest sink tile whose footprint fits the activation buffer. Searches
/// full-width row tiles of height 1..P first, then widths at height 1 if no
/// full row fits. Returns nullopt (infeasible) when even a 1x1 sink tile
/// exceeds capacity.
std::optional<TilePlan> max_tile_for_capacity(const ModelGraph& graph, const ShapeMap& shapes,
                                              const FusionGroup& group, const ArchConfig& arch);

/// Builds a standalone group (index 0) from an explicit node set, deriving
/// internal/in/out edges and sinks from the graph. Members may be given in
/// any order.
FusionGroup make_group(const ModelGraph& graph, const std::vector<std::size_t>& members);

}  // namespace fuseplan
