#pragma once

#include <cstdint>
#include <vector>

namespace fuseplan {

/// Height/width of a rectangular pixel region.
struct Window {
    int64_t h = 0;
    int64_t w = 0;

    int64_t area() const { return h * w; }
    friend bool operator==(const Window&, const Window&) = default;
};

/// Receptive-field plan for one fused group: the per-pass output tile at the
/// group sink(s) and, for every member layer, the output window it must
/// produce per pass (interior-pass maximal, clamped to the feature map).
struct TilePlan {
    std::size_t group_index = 0;
    int64_t sink_tile_h = 0;
    int64_t sink_tile_w = 0;  // full row width unless even one row does not fit

    /// Parallel to the group's member list.
    std::vector<Window> member_windows;

    /// Line-buffer rows retained across vertically adjacent passes, parallel
    /// to the group's internal edge list: (kernel - stride)+ of the consumer.
    std::vector<int64_t> cache_rows;

    /// Sweep passes needed to cover the group output (max over sinks).
    int64_t passes = 1;
};

/// On-chip bytes a plan occupies in the activation buffer during one pass.
struct FootprintReport {
    int64_t input_bytes = 0;      // staged DRAM input tiles
    int64_t cached_bytes = 0;     // line-buffer rows kept across passes
    int64_t transient_bytes = 0;  // intermediate windows for the current pass
    int64_t output_bytes = 0;     // sink tiles awaiting offload

    int64_t total() const { return input_bytes + cached_bytes + transient_bytes + output_bytes; }
};

}  // namespace fuseplan
