#include "fuseplan/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fuseplan {

DramTraffic& DramTraffic::operator+=(const DramTraffic& o) {
    input_act_read_bytes += o.input_act_read_bytes;
    weight_read_bytes += o.weight_read_bytes;
    spill_read_bytes += o.spill_read_bytes;
    output_act_write_bytes += o.output_act_write_bytes;
    spill_write_bytes += o.spill_write_bytes;
    return *this;
}

OnChipTraffic& OnChipTraffic::operator+=(const OnChipTraffic& o) {
    activation_buffer_bytes += o.activation_buffer_bytes;
    weight_buffer_bytes += o.weight_buffer_bytes;
    scratchpad_bytes += o.scratchpad_bytes;
    return *this;
}

int64_t mac_count(const ModelGraph& graph, const ShapeMap& shapes, std::size_t node) {
    const LayerSpec& l = graph.layer(node);
    const LayerShapes& ls = shapes.at(node);
    int64_t p = ls.output.height, q = ls.output.width;
    int64_t c = ls.inputs.front().channels, m = ls.output.channels;
    switch (l.kind) {
        case LayerKind::conv: return m * p * q * c * l.kernel_h * l.kernel_w;
        case LayerKind::depthwise_conv: return c * p * q * l.kernel_h * l.kernel_w;
        case LayerKind::pointwise_conv: return m * p * q * c;
        default: return 0;  // pools, adds and concats run on the vector path
    }
}

namespace {

struct Interval {
    int64_t lo = 0;
    int64_t hi = -1;  // inclusive; empty when hi < lo

    bool empty() const { return hi < lo; }
    int64_t length() const { return empty() ? 0 : hi - lo + 1; }
};

Interval hull(Interval a, Interval b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

// Input coordinates one consumer touches on one axis, over its full output.
std::vector<char> axis_used_mask(int64_t in_extent, int64_t out_extent, int64_t kernel,
                                 int64_t stride, int64_t pad) {
    std::vector<char> used(static_cast<std::size_t>(in_extent), 0);
    for (int64_t o = 0; o < out_extent; ++o) {
        int64_t lo = o * stride - pad;
        for (int64_t r = 0; r < kernel; ++r) {
            int64_t c = lo + r;
            if (c >= 0 && c < in_extent) used[static_cast<std::size_t>(c)] = 1;
        }
    }
    return used;
}

int64_t intersect_count(const std::vector<const std::vector<char>*>& masks, std::size_t size) {
    int64_t n = 0;
    for (std::size_t i = 0; i < size; ++i) {
        bool all = true;
        for (const auto* m : masks)
            if (!(*m)[i]) {
                all = false;
                break;
            }
        n += all;
    }
    return n;
}

// Distinct elements of a tensor read by a set of consumers. Each consumer's
// used set is a row-set x column-set product, so inclusion-exclusion over
// per-axis intersections counts the union exactly.
int64_t used_elements(const TensorShape& tensor,
                      const std::vector<std::pair<std::vector<char>, std::vector<char>>>& uses) {
    if (uses.empty()) return 0;
    if (uses.size() == 1) {
        int64_t rows = std::count(uses[0].first.begin(), uses[0].first.end(), 1);
        int64_t cols = std::count(uses[0].second.begin(), uses[0].second.end(), 1);
        return rows * cols;
    }
    int64_t total = 0;
    std::size_t n = uses.size();
    for (std::size_t subset = 1; subset < (std::size_t{1} << n); ++subset) {
        std::vector<const std::vector<char>*> rows, cols;
        for (std::size_t i = 0; i < n; ++i)
            if (subset & (std::size_t{1} << i)) {
                rows.push_back(&uses[i].first);
                cols.push_back(&uses[i].second);
            }
        int64_t term = intersect_count(rows, static_cast<std::size_t>(tensor.height)) *
                       intersect_count(cols, static_cast<std::size_t>(tensor.width));
        total += (__builtin_popcountll(subset) % 2 == 1) ? term : -term;
    }
    return total;
}

struct AxisGeom {
    int64_t kernel, stride, pad, in_extent, out_extent;
};

AxisGeom axis_geom(const ModelGraph& graph, const ShapeMap& shapes, std::size_t node, int axis) {
    const LayerSpec& l = graph.layer(node);
    const LayerShapes& ls = shapes.at(node);
    if (axis == 0)
        return {l.window_kernel_h(), l.window_stride_h(), l.window_pad_h(),
                ls.inputs.front().height, ls.output.height};
    return {l.window_kernel_w(), l.window_stride_w(), l.window_pad_w(), ls.inputs.front().width,
            ls.output.width};
}

// Per-member input rows (or columns) staged from the activation buffer,
// summed over every band of the sink sweep on one axis. Boundary bands use
// their true, smaller windows.
std::vector<int64_t> staged_axis_sums(const ModelGraph& graph, const ShapeMap& shapes,
                                      const FusionGroup& group, int axis, int64_t tile_len) {
    std::vector<std::size_t> slot(graph.node_count(), 0);
    std::vector<char> inside(graph.node_count(), 0);
    for (std::size_t i = 0; i < group.members.size(); ++i) {
        slot[group.members[i]] = i;
        inside[group.members[i]] = 1;
    }

    int64_t bands = 1;
    for (std::size_t s : group.sinks) {
        int64_t extent = axis == 0 ? shapes.output(s).height : shapes.output(s).width;
        int64_t t = std::min(tile_len, extent);
        bands = std::max(bands, (extent + t - 1) / t);
    }

    std::vector<int64_t> sums(group.members.size(), 0);
    std::vector<Interval> demand(group.members.size());
    for (int64_t band = 0; band < bands; ++band) {
        std::fill(demand.begin(), demand.end(), Interval{});
        for (std::size_t s : group.sinks) {
            int64_t extent = axis == 0 ? shapes.output(s).height : shapes.output(s).width;
            int64_t t = std::min(tile_len, extent);
            int64_t lo = band * t;
            if (lo >= extent) continue;  // this sink finished in an earlier band
            demand[slot[s]] = hull(demand[slot[s]], {lo, std::min(extent, lo + t) - 1});
        }
        for (auto it = group.members.rbegin(); it != group.members.rend(); ++it) {
            std::size_t m = *it;
            Interval out = demand[slot[m]];
            if (out.empty()) continue;
            AxisGeom g = axis_geom(graph, shapes, m, axis);
            Interval in{std::max<int64_t>(0, out.lo * g.stride - g.pad),
                        std::min(g.in_extent - 1, (out.hi * g.stride - g.pad) + g.kernel - 1)};
            sums[slot[m]] += in.length();
            for (std::size_t e : graph.in_edges(m)) {
                std::size_t p = graph.edges()[e].from;
                if (inside[p]) demand[slot[p]] = hull(demand[slot[p]], in);
            }
        }
    }
    return sums;
}

int64_t ceil_div_pos(double num, double den) {
    return static_cast<int64_t>(std::ceil(num / den));
}

EvalResult evaluate_group_impl(const ModelGraph& graph, const ShapeMap& shapes,
                               const FusionGroup& group, const TilePlan& plan,
                               const ArchConfig& arch, bool standalone) {
    if (plan.member_windows.size() != group.members.size())
        throw std::invalid_argument("plan does not match group");

    std::vector<char> inside(graph.node_count(), 0);
    std::vector<std::size_t> slot(graph.node_count(), 0);
    for (std::size_t i = 0; i < group.members.size(); ++i) {
        inside[group.members[i]] = 1;
        slot[group.members[i]] = i;
    }

    EvalResult r;

    // --- DRAM activation reads: each used element of an external tensor is
    // fetched exactly once per consuming group.
    std::map<std::size_t, std::vector<std::size_t>> external_consumers;  // producer -> members
    for (std::size_t e : group.in_edges)
        external_consumers[graph.edges()[e].from].push_back(graph.edges()[e].to);

    int64_t input_fetch_bytes = 0;  // all DRAM activation bytes entering this group
    for (const auto& [producer, consumers] : external_consumers) {
        const TensorShape& t = shapes.output(producer);
        std::vector<std::pair<std::vector<char>, std::vector<char>>> uses;
        for (std::size_t c : consumers) {
            AxisGeom gh = axis_geom(graph, shapes, c, 0);
            AxisGeom gw = axis_geom(graph, shapes, c, 1);
            uses.emplace_back(
                axis_used_mask(gh.in_extent, gh.out_extent, gh.kernel, gh.stride, gh.pad),
                axis_used_mask(gw.in_extent, gw.out_extent, gw.kernel, gw.stride, gw.pad));
        }
        int64_t bytes =
            used_elements(t, uses) * t.channels * graph.layer(producer).bytes_per_element;
        input_fetch_bytes += bytes;
        if (standalone)
            r.dram.input_act_read_bytes += bytes;
        else
            r.dram.spill_read_bytes += bytes;
    }
    for (std::size_t m : group.members) {
        if (!graph.is_source(m)) continue;
        const TensorShape& in = shapes.at(m).inputs.front();
        AxisGeom gh = axis_geom(graph, shapes, m, 0);
        AxisGeom gw = axis_geom(graph, shapes, m, 1);
        std::vector<std::pair<std::vector<char>, std::vector<char>>> uses;
        uses.emplace_back(axis_used_mask(gh.in_extent, gh.out_extent, gh.kernel, gh.stride, gh.pad),
                          axis_used_mask(gw.in_extent, gw.out_extent, gw.kernel, gw.stride, gw.pad));
        int64_t bytes = used_elements(in, uses) * in.channels * graph.layer(m).bytes_per_element;
        input_fetch_bytes += bytes;
        r.dram.input_act_read_bytes += bytes;
    }

    // --- DRAM activation writes: every tensor leaving the group is stored
    // in full, exactly once.
    int64_t output_store_bytes = 0;
    for (std::size_t m : group.members) {
        bool external_consumer = false;
        for (std::size_t e : graph.out_edges(m))
            if (!inside[graph.edges()[e].to]) external_consumer = true;
        bool graph_sink = graph.is_sink(m);
        if (!external_consumer && !graph_sink) continue;
        int64_t bytes =
            shapes.output(m).element_count() * graph.layer(m).bytes_per_element;
        output_store_bytes += bytes;
        if (!standalone && external_consumer) {
            r.dram.spill_write_bytes += bytes;
            r.offload_events += 1;
        } else {
            r.dram.output_act_write_bytes += bytes;
        }
    }

    // --- Weights: loaded once if the group fits the weight buffer, else
    // re-streamed from DRAM every pass.
    int64_t weights_total = 0;
    for (std::size_t m : group.members) weights_total += weight_bytes(graph, shapes, m);
    bool weights_fit = weights_total <= arch.weight_buffer_bytes;
    r.dram.weight_read_bytes = weights_total * (weights_fit ? 1 : plan.passes);

    // --- MACs.
    for (std::size_t m : group.members) r.mac_count += mac_count(graph, shapes, m);

    // --- On-chip traffic.
    // Activation buffer writes: every fetched input element once, every
    // produced element once. Reads: inputs re-staged to the scratchpad each
    // pass (halo rows come from the buffer, not DRAM), intermediates read
    // once per consumer, outputs read once for offload.
    int64_t produced_bytes = 0;
    for (std::size_t m : group.members)
        produced_bytes += shapes.output(m).element_count() * graph.layer(m).bytes_per_element;

    auto staged_h = staged_axis_sums(graph, shapes, group, 0, plan.sink_tile_h);
    auto staged_w = staged_axis_sums(graph, shapes, group, 1, plan.sink_tile_w);
    int64_t staged_bytes = 0;
    for (std::size_t e : group.in_edges) {
        std::size_t producer = graph.edges()[e].from;
        std::size_t m = graph.edges()[e].to;
        const TensorShape& t = shapes.output(producer);
        staged_bytes += staged_h[slot[m]] * staged_w[slot[m]] * t.channels *
                        graph.layer(producer).bytes_per_element;
    }
    for (std::size_t m : group.members) {
        if (!graph.is_source(m)) continue;
        const TensorShape& in = shapes.at(m).inputs.front();
        staged_bytes +=
            staged_h[slot[m]] * staged_w[slot[m]] * in.channels * graph.layer(m).bytes_per_element;
    }

    int64_t intermediate_read_bytes = 0;
    for (std::size_t e : group.internal_edges) {
        std::size_t producer = graph.edges()[e].from;
        intermediate_read_bytes +=
            shapes.output(producer).element_count() * graph.layer(producer).bytes_per_element;
    }

    r.on_chip.activation_buffer_bytes = (input_fetch_bytes + produced_bytes) +
                                        (staged_bytes + intermediate_read_bytes +
                                         output_store_bytes);

    // Weight buffer: DRAM loads written once, streamed to the scratchpads
    // every pass.
    r.on_chip.weight_buffer_bytes = r.dram.weight_read_bytes + weights_total * plan.passes;

    // Scratchpad: both operands of every MAC.
    for (std::size_t m : group.members)
        r.on_chip.scratchpad_bytes +=
            2 * mac_count(graph, shapes, m) * graph.layer(m).bytes_per_element;

    // --- Energy and cycles. Compute and DRAM transfers overlap fully.
    const EnergyTable& e = arch.energy;
    r.energy_pj = r.dram.total_bytes() * e.dram_pj_per_byte +
                  r.on_chip.activation_buffer_bytes * e.activation_buffer_pj_per_byte +
                  r.on_chip.weight_buffer_bytes * e.weight_buffer_pj_per_byte +
                  r.on_chip.scratchpad_bytes * e.pe_scratchpad_pj_per_byte +
                  r.mac_count * e.mac_pj;
    r.compute_cycles = ceil_div_pos(static_cast<double>(r.mac_count),
                                    static_cast<double>(arch.peak_macs_per_cycle()));
    r.memory_cycles =
        ceil_div_pos(static_cast<double>(r.dram.total_bytes()), arch.dram_bytes_per_cycle());
    r.cycles = std::max(r.compute_cycles, r.memory_cycles);
    r.edp_pj_s = r.energy_pj * (static_cast<double>(r.cycles) / arch.clock_hz);
    r.pj_per_mac = r.mac_count > 0 ? r.energy_pj / static_cast<double>(r.mac_count) : 0.0;
    return r;
}

}  // namespace

EvalResult evaluate_group(const ModelGraph& graph, const ShapeMap& shapes,
                          const FusionGroup& group, const TilePlan& plan, const ArchConfig& arch) {
    return evaluate_group_impl(graph, shapes, group, plan, arch, /*standalone=*/true);
}

ScheduleEvaluation evaluate_schedule_detailed(const ModelGraph& graph, const ShapeMap& shapes,
                                              const FusionGenome& genome, const ArchConfig& arch) {
    ScheduleEvaluation out;
    out.groups = derive_groups(graph, genome);

    EvalResult& total = out.total;
    for (const FusionGroup& g : out.groups) {
        auto plan = max_tile_for_capacity(graph, shapes, g, arch);
        if (!plan)
            throw UnschedulableError("group of '" + graph.layer(g.members.front()).id +
                                     "' exceeds the activation buffer at a 1x1 sink tile");
        EvalResult r = evaluate_group_impl(graph, shapes, g, *plan, arch, /*standalone=*/false);
        total.dram += r.dram;
        total.on_chip += r.on_chip;
        total.mac_count += r.mac_count;
        total.offload_events += r.offload_events;
        total.compute_cycles += r.compute_cycles;
        total.memory_cycles += r.memory_cycles;
        total.cycles += r.cycles;  // groups execute sequentially
        total.energy_pj += r.energy_pj;

        int64_t weights_total = 0;
        for (std::size_t m : g.members) weights_total += weight_bytes(graph, shapes, m);
        out.weights_fit.push_back(weights_total <= arch.weight_buffer_bytes ? 1 : 0);
        out.plans.push_back(std::move(*plan));
        out.per_group.push_back(std::move(r));
    }
    total.edp_pj_s = total.energy_pj * (static_cast<double>(total.cycles) / arch.clock_hz);
    total.pj_per_mac =
        total.mac_count > 0 ? total.energy_pj / static_cast<double>(total.mac_count) : 0.0;
    return out;
}

EvalResult evaluate_schedule(const ModelGraph& graph, const ShapeMap& shapes,
                             const FusionGenome& genome, const ArchConfig& arch) {
    return evaluate_schedule_detailed(graph, shapes, genome, arch).total;
}

EvalResult evaluate_layerwise(const ModelGraph& graph, const ShapeMap& shapes,
                              const ArchConfig& arch) {
    return evaluate_schedule(graph, shapes, FusionGenome::all_split(graph), arch);
}

std::vector<SweepPoint> pj_per_mac_sweep(const ModelGraph& graph, const ShapeMap& shapes,
                                         const FusionGroup& group, const ArchConfig& arch,
                                         const std::vector<Window>& tiles) {
    std::vector<SweepPoint> points;
    points.reserve(tiles.size());
    for (Window tile : tiles) {
        SweepPoint pt;
        pt.tile = tile;
        TilePlan plan = backtrace_window(graph, shapes, group, tile);
        if (intermediate_footprint(graph, shapes, group, plan).total() <=
            arch.activation_buffer_bytes) {
            EvalResult r = evaluate_group(graph, shapes, group, plan, arch);
            pt.feasible = true;
            pt.pj_per_mac = r.pj_per_mac;
            pt.energy_pj = r.energy_pj;
        }
        points.push_back(pt);
    }
    return points;
}

}  // namespace fuseplan
