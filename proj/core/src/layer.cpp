#include "fuseplan/layer.hpp"

namespace fuseplan {

const char* to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::conv: return "conv";
        case LayerKind::depthwise_conv: return "depthwise_conv";
        case LayerKind::pointwise_conv: return "pointwise_conv";
        case LayerKind::pool_max: return "pool_max";
        case LayerKind::pool_avg: return "pool_avg";
        case LayerKind::elementwise_add: return "elementwise_add";
        case LayerKind::concat: return "concat";
    }
    return "?";
}

LayerKind layer_kind_from_string(const std::string& text) {
    if (text == "conv") return LayerKind::conv;
    if (text == "depthwise_conv") return LayerKind::depthwise_conv;
    if (text == "pointwise_conv") return LayerKind::pointwise_conv;
    if (text == "pool_max") return LayerKind::pool_max;
    if (text == "pool_avg") return LayerKind::pool_avg;
    if (text == "elementwise_add") return LayerKind::elementwise_add;
    if (text == "concat") return LayerKind::concat;
    throw ParseError("unknown layer kind: '" + text + "'");
}

}  // namespace fuseplan
