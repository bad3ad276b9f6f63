#pragma once

#include <string>
#include <vector>

#include "fuseplan/arch.hpp"
#include "fuseplan/descriptor.hpp"
#include "fuseplan/model_graph.hpp"
#include "fuseplan/shape_inference.hpp"

namespace fuseplan::test {

struct ChainLayerSpec {
    int64_t kernel = 3;
    int64_t stride = 1;
    int64_t pad = 0;
    int64_t out_channels = 0;  // 0 = keep input channel count
};

/// conv chain l1 -> l2 -> ... -> ln.
inline ModelGraph make_chain(const std::vector<ChainLayerSpec>& layers, int64_t in_ch,
                             int64_t in_hw) {
    ModelGraph g;
    g.set_name("chain" + std::to_string(layers.size()));
    std::string prev;
    int64_t ch = in_ch;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const ChainLayerSpec& spec = layers[i];
        LayerSpec l;
        l.id = "l" + std::to_string(i + 1);
        l.kind = LayerKind::conv;
        l.kernel_h = l.kernel_w = spec.kernel;
        l.stride_h = l.stride_w = spec.stride;
        l.pad_h = l.pad_w = spec.pad;
        l.out_channels = spec.out_channels > 0 ? spec.out_channels : ch;
        ch = l.out_channels;
        g.add_layer(l);
        if (!prev.empty()) g.add_edge(prev, l.id);
        prev = l.id;
    }
    g.set_input_shape("l1", {in_ch, in_hw, in_hw});
    g.validate();
    return g;
}

inline ModelGraph make_uniform_chain(std::size_t n, int64_t ch = 16, int64_t hw = 32,
                                     int64_t kernel = 3, int64_t pad = 1) {
    std::vector<ChainLayerSpec> layers(n, ChainLayerSpec{kernel, 1, pad, ch});
    return make_chain(layers, ch, hw);
}

/// a -> {b, c} -> d with d = elementwise_add(b, c).
inline ModelGraph make_diamond(int64_t ch = 8, int64_t hw = 16) {
    ModelGraph g;
    g.set_name("diamond");
    for (const char* id : {"a", "b", "c"}) {
        LayerSpec l;
        l.id = id;
        l.kind = LayerKind::conv;
        l.kernel_h = l.kernel_w = 3;
        l.stride_h = l.stride_w = 1;
        l.pad_h = l.pad_w = 1;
        l.out_channels = ch;
        g.add_layer(l);
    }
    LayerSpec add;
    add.id = "d";
    add.kind = LayerKind::elementwise_add;
    g.add_layer(add);
    g.add_edge("a", "b");
    g.add_edge("a", "c");
    g.add_edge("b", "d");
    g.add_edge("c", "d");
    g.set_input_shape("a", {ch, hw, hw});
    g.validate();
    return g;
}

/// Residual block: a -> b -> c -> d plus skip a -> d, d = add(c, a).
/// Edge order: a->b, b->c, c->d, a->d.
inline ModelGraph make_residual(int64_t ch = 8, int64_t hw = 16) {
    ModelGraph g;
    g.set_name("residual");
    for (const char* id : {"a", "b", "c"}) {
        LayerSpec l;
        l.id = id;
        l.kind = LayerKind::conv;
        l.kernel_h = l.kernel_w = 3;
        l.stride_h = l.stride_w = 1;
        l.pad_h = l.pad_w = 1;
        l.out_channels = ch;
        g.add_layer(l);
    }
    LayerSpec add;
    add.id = "d";
    add.kind = LayerKind::elementwise_add;
    g.add_layer(add);
    g.add_edge("a", "b");
    g.add_edge("b", "c");
    g.add_edge("c", "d");
    g.add_edge("a", "d");
    g.set_input_shape("a", {ch, hw, hw});
    g.validate();
    return g;
}

/// Arch with buffers big enough that capacity never binds.
inline ArchConfig unbounded_arch() {
    ArchConfig a;
    a.name = "unbounded";
    a.pe_x = 4;
    a.pe_y = 4;
    a.macs_per_pe = 64;
    a.activation_buffer_bytes = int64_t{1} << 40;
    a.weight_buffer_bytes = int64_t{1} << 40;
    return a;
}

inline ArchConfig toy_arch(int64_t act_bytes, int64_t weight_bytes = 512 * 1024) {
    ArchConfig a;
    a.name = "toy";
    a.pe_x = 4;
    a.pe_y = 4;
    a.macs_per_pe = 64;
    a.activation_buffer_bytes = act_bytes;
    a.weight_buffer_bytes = weight_bytes;
    return a;
}

}  // namespace fuseplan::test
