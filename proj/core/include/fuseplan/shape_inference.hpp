#pragma once

#include <cstdint>
#include <vector>

#include "fuseplan/model_graph.hpp"

namespace fuseplan {

/// Resolved tensor shapes around one layer. Inputs are ordered by the
/// layer's incoming edge order (operand order for concat).
struct LayerShapes {
    std::vector<TensorShape> inputs;
    TensorShape output;
};

/// Per-node shapes, indexed like ModelGraph nodes.
struct ShapeMap {
    std::vector<LayerShapes> per_node;

    const LayerShapes& at(std::size_t node) const { return per_node[node]; }
    const TensorShape& output(std::size_t node) const { return per_node[node].output; }
};

/// Propagates shapes from the graph inputs. Output spatial dims follow
/// P = floor((H + 2*pad - kernel) / stride) + 1. Channel rules by kind:
/// conv/pointwise take out_channels, depthwise and pools keep the input
/// channel count, elementwise_add keeps the common operand shape, concat
/// sums operand channels. Throws ValidationError on a non-positive computed
/// dimension or an operand shape mismatch.
ShapeMap infer_shapes(const ModelGraph& graph);

/// Weight bytes of one layer (zero for pools/joins).
int64_t weight_bytes(const ModelGraph& graph, const ShapeMap& shapes, std::size_t node);

/// Per-layer activation footprint in bytes.
struct FootprintRow {
    std::size_t node = 0;
    int64_t input_bytes = 0;   // summed over all operands
    int64_t output_bytes = 0;
};

std::vector<FootprintRow> activation_footprints(const ModelGraph& graph, const ShapeMap& shapes);

}  // namespace fuseplan
