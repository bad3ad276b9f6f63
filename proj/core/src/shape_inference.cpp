#include "fuseplan/shape_inference.hpp"

namespace fuseplan {

namespace {

int64_t out_extent(const std::string& id, int64_t in, int64_t pad, int64_t kernel,
                   int64_t stride) {
    int64_t span = in + 2 * pad - kernel;
    if (span < 0)
        throw ValidationError("layer '" + id + "': kernel exceeds padded input extent");
    int64_t out = span / stride + 1;
    if (out < 1) throw ValidationError("layer '" + id + "': non-positive output dimension");
    return out;
}

}  // namespace

ShapeMap infer_shapes(const ModelGraph& graph) {
    ShapeMap shapes;
    shapes.per_node.resize(graph.node_count());

    for (std::size_t n : topological_sort(graph)) {
        const LayerSpec& l = graph.layer(n);
        LayerShapes& ls = shapes.per_node[n];

        if (graph.is_source(n)) {
            auto in = graph.input_shape(n);
            if (!in) throw ValidationError("source layer '" + l.id + "' has no input shape");
            ls.inputs = {*in};
        } else {
            for (std::size_t e : graph.in_edges(n))
                ls.inputs.push_back(shapes.per_node[graph.edges()[e].from].output);
        }

        const TensorShape& first = ls.inputs.front();
        switch (l.kind) {
            case LayerKind::conv:
            case LayerKind::pointwise_conv: {
                if (l.out_channels < 1)
                    throw ValidationError("layer '" + l.id + "': out_channels required");
                ls.output.channels = l.out_channels;
                break;
            }
            case LayerKind::depthwise_conv: {
                if (l.out_channels != 0 && l.out_channels != first.channels)
                    throw ValidationError("layer '" + l.id +
                                          "': depthwise out_channels must equal input channels");
                ls.output.channels = first.channels;
                break;
            }
            case LayerKind::pool_max:
            case LayerKind::pool_avg: {
                if (l.out_channels != 0 && l.out_channels != first.channels)
                    throw ValidationError("layer '" + l.id +
                                          "': pool out_channels must equal input channels");
                ls.output.channels = first.channels;
                break;
            }
            case LayerKind::elementwise_add: {
                for (const TensorShape& s : ls.inputs)
                    if (s != first)
                        throw ValidationError("layer '" + l.id +
                                              "': elementwise_add operand shapes differ");
                if (l.out_channels != 0 && l.out_channels != first.channels)
                    throw ValidationError("layer '" + l.id +
                                          "': add out_channels must equal operand channels");
                ls.output.channels = first.channels;
                break;
            }
            case LayerKind::concat: {
                int64_t total = 0;
                for (const TensorShape& s : ls.inputs) {
                    if (s.height != first.height || s.width != first.width)
                        throw ValidationError("layer '" + l.id +
                                              "': concat operand spatial dims differ");
                    total += s.channels;
                }
                if (l.out_channels != 0 && l.out_channels != total)
                    throw ValidationError("layer '" + l.id +
                                          "': concat out_channels must equal channel sum");
                ls.output.channels = total;
                break;
            }
        }

        if (is_join_kind(l.kind)) {
            ls.output.height = first.height;
            ls.output.width = first.width;
        } else {
            ls.output.height = out_extent(l.id, first.height, l.pad_h, l.kernel_h, l.stride_h);
            ls.output.width = out_extent(l.id, first.width, l.pad_w, l.kernel_w, l.stride_w);
        }
    }
    return shapes;
}

int64_t weight_bytes(const ModelGraph& graph, const ShapeMap& shapes, std::size_t node) {
    const LayerSpec& l = graph.layer(node);
    if (!l.has_weights()) return 0;
    const LayerShapes& ls = shapes.at(node);
    return l.weight_count(ls.inputs.front().channels, ls.output.channels) * l.bytes_per_element;
}

std::vector<FootprintRow> activation_footprints(const ModelGraph& graph, const ShapeMap& shapes) {
    std::vector<FootprintRow> rows;
    rows.reserve(graph.node_count());
    for (std::size_t n = 0; n < graph.node_count(); ++n) {
        const LayerShapes& ls = shapes.at(n);
        FootprintRow row;
        row.node = n;
        for (const TensorShape& s : ls.inputs)
            row.input_bytes += s.element_count() * graph.layer(n).bytes_per_element;
        row.output_bytes = ls.output.element_count() * graph.layer(n).bytes_per_element;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace fuseplan
