#include "fuseplan/receptive_field.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace fuseplan {

namespace {

int64_t positive_part(int64_t v) { return v > 0 ? v : 0; }

// (out - 1) * stride + kernel, clamped to the real input extent. Padding
// supplies virtual pixels, so the demand never exceeds the feature map.
int64_t input_demand(int64_t out_window, int64_t kernel, int64_t stride, int64_t input_extent) {
    return std::min((out_window - 1) * stride + kernel, input_extent);
}

// Convexity of an explicit node set: no directed path may leave the set and
// re-enter it. Exact check via forward/backward reachability through
// non-members.
bool is_convex(const ModelGraph& graph, const std::vector<char>& inside) {
    std::vector<char> fwd(graph.node_count(), 0), bwd(graph.node_count(), 0);
    std::vector<std::size_t> stack;
    for (std::size_t n = 0; n < graph.node_count(); ++n)
        if (inside[n]) stack.push_back(n);
    std::vector<std::size_t> seed = stack;
    while (!stack.empty()) {
        std::size_t n = stack.back();
        stack.pop_back();
        for (std::size_t s : graph.successors(n))
            if (!inside[s] && !fwd[s]) {
                fwd[s] = 1;
                stack.push_back(s);
            }
    }
    stack = seed;
    while (!stack.empty()) {
        std::size_t n = stack.back();
        stack.pop_back();
        for (std::size_t p : graph.predecessors(n))
            if (!inside[p] && !bwd[p]) {
                bwd[p] = 1;
                stack.push_back(p);
            }
    }
    // An outside node both reachable from the set and reaching back into it
    // closes a re-entrant path.
    for (std::size_t n = 0; n < graph.node_count(); ++n)
        if (fwd[n] && bwd[n]) return false;
    return true;
}

}  // namespace

FusionGroup make_group(const ModelGraph& graph, const std::vector<std::size_t>& members) {
    if (members.empty()) throw std::invalid_argument("group must not be empty");
    std::vector<char> inside(graph.node_count(), 0);
    for (std::size_t m : members) {
        if (m >= graph.node_count()) throw std::invalid_argument("group member out of range");
        inside[m] = 1;
    }
    auto comps = weakly_connected_components(graph, members);
    if (comps.size() != 1) throw std::invalid_argument("group must be weakly connected");
    if (!is_convex(graph, inside))
        throw ConvexityError(members.front(), members.back(),
                             "group is not convex: a path leaves and re-enters it");

    FusionGroup g;
    g.index = 0;
    g.members = topological_sort(graph, members);
    for (std::size_t m : g.members) {
        bool has_internal_consumer = false;
        for (std::size_t e : graph.out_edges(m)) {
            if (inside[graph.edges()[e].to]) {
                g.internal_edges.push_back(e);
                has_internal_consumer = true;
            } else {
                g.out_edges.push_back(e);
            }
        }
        for (std::size_t e : graph.in_edges(m))
            if (!inside[graph.edges()[e].from]) g.in_edges.push_back(e);
        if (!has_internal_consumer) g.sinks.push_back(m);
    }
    std::sort(g.internal_edges.begin(), g.internal_edges.end());
    std::sort(g.in_edges.begin(), g.in_edges.end());
    std::sort(g.out_edges.begin(), g.out_edges.end());
    return g;
}

TilePlan backtrace_window(const ModelGraph& graph, const ShapeMap& shapes,
                          const FusionGroup& group, Window sink_tile) {
    if (group.members.empty()) throw std::invalid_argument("group must not be empty");
    if (sink_tile.h < 1 || sink_tile.w < 1)
        throw std::invalid_argument("sink tile must be at least 1x1");

    std::vector<char> inside(graph.node_count(), 0);
    std::vector<std::size_t> slot(graph.node_count(), 0);
    for (std::size_t i = 0; i < group.members.size(); ++i) {
        inside[group.members[i]] = 1;
        slot[group.members[i]] = i;
    }

    TilePlan plan;
    plan.sink_tile_h = sink_tile.h;
    plan.sink_tile_w = sink_tile.w;
    plan.member_windows.assign(group.members.size(), Window{0, 0});

    // Seed every sink with its clamped tile, then propagate demands from
    // consumers to producers in reverse topological order.
    for (std::size_t s : group.sinks) {
        const TensorShape& out = shapes.output(s);
        plan.member_windows[slot[s]] = {std::min(sink_tile.h, out.height),
                                        std::min(sink_tile.w, out.width)};
    }
    for (auto it = group.members.rbegin(); it != group.members.rend(); ++it) {
        std::size_t m = *it;
        Window w = plan.member_windows[slot[m]];
        if (w.h == 0) continue;  // unreachable from any sink (single-member demand gaps)
        const LayerSpec& l = graph.layer(m);
        const TensorShape& in = shapes.at(m).inputs.front();
        Window demand{input_demand(w.h, l.window_kernel_h(), l.window_stride_h(), in.height),
                      input_demand(w.w, l.window_kernel_w(), l.window_stride_w(), in.width)};
        for (std::size_t e : graph.in_edges(m)) {
            std::size_t p = graph.edges()[e].from;
            if (!inside[p]) continue;
            Window& pw = plan.member_windows[slot[p]];
            pw.h = std::max(pw.h, demand.h);
            pw.w = std::max(pw.w, demand.w);
        }
    }

    plan.cache_rows.reserve(group.internal_edges.size());
    for (std::size_t e : group.internal_edges) {
        const LayerSpec& consumer = graph.layer(graph.edges()[e].to);
        plan.cache_rows.push_back(
            positive_part(consumer.window_kernel_h() - consumer.window_stride_h()));
    }

    plan.passes = 1;
    for (std::size_t s : group.sinks) {
        const TensorShape& out = shapes.output(s);
        int64_t th = std::min(sink_tile.h, out.height);
        int64_t tw = std::min(sink_tile.w, out.width);
        int64_t p = ((out.height + th - 1) / th) * ((out.width + tw - 1) / tw);
        plan.passes = std::max(plan.passes, p);
    }
    plan.group_index = group.index;
    return plan;
}

FootprintReport intermediate_footprint(const ModelGraph& graph, const ShapeMap& shapes,
                                       const FusionGroup& group, const TilePlan& plan) {
    if (plan.member_windows.size() != group.members.size())
        throw std::invalid_argument("plan does not match group");

    std::vector<std::size_t> slot(graph.node_count(), 0);
    std::vector<char> inside(graph.node_count(), 0);
    for (std::size_t i = 0; i < group.members.size(); ++i) {
        inside[group.members[i]] = 1;
        slot[group.members[i]] = i;
    }

    FootprintReport fp;

    // DRAM input tiles: one staged window per external tensor; a tensor read
    // by several members occupies the widest demanded window once.
    std::map<std::size_t, Window> producer_window;  // external producer -> window
    for (std::size_t e : group.in_edges) {
        std::size_t m = graph.edges()[e].to;
        const LayerSpec& l = graph.layer(m);
        const Window& w = plan.member_windows[slot[m]];
        const TensorShape& in = shapes.at(m).inputs.front();
        Window demand{input_demand(w.h, l.window_kernel_h(), l.window_stride_h(), in.height),
                      input_demand(w.w, l.window_kernel_w(), l.window_stride_w(), in.width)};
        Window& agg = producer_window[graph.edges()[e].from];
        agg.h = std::max(agg.h, demand.h);
        agg.w = std::max(agg.w, demand.w);
    }
    for (const auto& [p, w] : producer_window) {
        const TensorShape& t = shapes.output(p);
        fp.input_bytes += w.area() * t.channels * graph.layer(p).bytes_per_element;
    }
    for (std::size_t m : group.members) {
        if (!graph.is_source(m)) continue;
        const LayerSpec& l = graph.layer(m);
        const Window& w = plan.member_windows[slot[m]];
        const TensorShape& in = shapes.at(m).inputs.front();
        Window demand{input_demand(w.h, l.window_kernel_h(), l.window_stride_h(), in.height),
                      input_demand(w.w, l.window_kernel_w(), l.window_stride_w(), in.width)};
        fp.input_bytes += demand.area() * in.channels * l.bytes_per_element;
    }

    // Internal tensors: a transient window for the current pass plus the
    // line-buffer rows shared across the tensor's in-group consumers.
    std::map<std::size_t, int64_t> tensor_cache_rows;  // producer -> rows
    for (std::size_t i = 0; i < group.internal_edges.size(); ++i) {
        std::size_t p = graph.edges()[group.internal_edges[i]].from;
        int64_t& rows = tensor_cache_rows[p];
        rows = std::max(rows, plan.cache_rows[i]);
    }
    for (const auto& [p, rows] : tensor_cache_rows) {
        const TensorShape& t = shapes.output(p);
        int64_t bpe = graph.layer(p).bytes_per_element;
        fp.cached_bytes += rows * t.width * t.channels * bpe;
        fp.transient_bytes += plan.member_windows[slot[p]].area() * t.channels * bpe;
    }

    for (std::size_t s : group.sinks) {
        const TensorShape& out = shapes.output(s);
        int64_t th = std::min(plan.sink_tile_h, out.height);
        int64_t tw = std::min(plan.sink_tile_w, out.width);
        fp.output_bytes += th * tw * out.channels * graph.layer(s).bytes_per_element;
    }
    return fp;
}

std::optional<TilePlan> max_tile_for_capacity(const ModelGraph& graph, const ShapeMap& shapes,
                                              const FusionGroup& group, const ArchConfig& arch) {
    int64_t max_h = 1, max_w = 1;
    for (std::size_t s : group.sinks) {
        max_h = std::max(max_h, shapes.output(s).height);
        max_w = std::max(max_w, shapes.output(s).width);
    }

    auto fits = [&](Window tile) {
        TilePlan plan = backtrace_window(graph, shapes, group, tile);
        return intermediate_footprint(graph, shapes, group, plan).total() <=
               arch.activation_buffer_bytes;
    };

    // Footprint grows with tile area, so the feasible heights form a prefix
    // of 1..P and admit binary search.
    if (fits({max_h, max_w}))
        return backtrace_window(graph, shapes, group, {max_h, max_w});
    if (fits({1, max_w})) {
        int64_t lo = 1, hi = max_h;  // fits(lo), !fits(hi)
        while (hi - lo > 1) {
            int64_t mid = lo + (hi - lo) / 2;
            (fits({mid, max_w}) ? lo : hi) = mid;
        }
        return backtrace_window(graph, shapes, group, {lo, max_w});
    }
    if (!fits({1, 1})) return std::nullopt;
    int64_t lo = 1, hi = max_w;  // fits(1,lo), !fits(1,hi)
    while (hi - lo > 1) {
        int64_t mid = lo + (hi - lo) / 2;
        (fits({1, mid}) ? lo : hi) = mid;
    }
    return backtrace_window(graph, shapes, group, {1, lo});
}

}  // namespace fuseplan
