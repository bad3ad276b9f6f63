#include "fuseplan/descriptor.hpp"

#include <json.hpp>
#include <sstream>

#include "fuseplan/shape_inference.hpp"

namespace fuseplan {

namespace {

using nlohmann::json;

int64_t get_count(const json& j, const std::string& layer, const char* field, int64_t min_value) {
    if (!j.is_number_integer())
        throw ParseError("layer '" + layer + "': field '" + field + "' must be an integer");
    int64_t v = j.get<int64_t>();
    if (v < min_value)
        throw ParseError("layer '" + layer + "': field '" + field + "' out of range");
    return v;
}

std::pair<int64_t, int64_t> get_pair(const json& j, const std::string& layer, const char* field,
                                     int64_t min_value) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError("layer '" + layer + "': field '" + field + "' must be a 2-element array");
    return {get_count(j[0], layer, field, min_value), get_count(j[1], layer, field, min_value)};
}

ModelGraph build_graph(const json& doc) {
    if (!doc.is_object()) throw ParseError("descriptor root must be an object");

    ModelGraph graph;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw ParseError("field 'name' must be a string");
        graph.set_name(doc["name"].get<std::string>());
    }

    if (!doc.contains("layers") || !doc["layers"].is_array())
        throw ParseError("descriptor requires a 'layers' array");
    for (const json& jl : doc["layers"]) {
        if (!jl.is_object()) throw ParseError("each layer must be an object");
        if (!jl.contains("id") || !jl["id"].is_string())
            throw ParseError("layer missing string 'id'");
        LayerSpec l;
        l.id = jl["id"].get<std::string>();
        if (!jl.contains("kind") || !jl["kind"].is_string())
            throw ParseError("layer '" + l.id + "' missing string 'kind'");
        l.kind = layer_kind_from_string(jl["kind"].get<std::string>());
        if (jl.contains("kernel"))
            std::tie(l.kernel_h, l.kernel_w) = get_pair(jl["kernel"], l.id, "kernel", 1);
        if (jl.contains("stride"))
            std::tie(l.stride_h, l.stride_w) = get_pair(jl["stride"], l.id, "stride", 1);
        if (jl.contains("pad")) std::tie(l.pad_h, l.pad_w) = get_pair(jl["pad"], l.id, "pad", 0);
        if (jl.contains("out_channels"))
            l.out_channels = get_count(jl["out_channels"], l.id, "out_channels", 1);
        if (jl.contains("bytes_per_element"))
            l.bytes_per_element = get_count(jl["bytes_per_element"], l.id, "bytes_per_element", 1);
        if (l.kind == LayerKind::pointwise_conv && !jl.contains("kernel")) {
            l.kernel_h = l.kernel_w = 1;
        }
        graph.add_layer(std::move(l));
    }

    if (doc.contains("edges")) {
        if (!doc["edges"].is_array()) throw ParseError("field 'edges' must be an array");
        for (const json& je : doc["edges"]) {
            if (!je.is_array() || je.size() != 2 || !je[0].is_string() || !je[1].is_string())
                throw ParseError("each edge must be a [from, to] pair of layer ids");
            graph.add_edge(je[0].get<std::string>(), je[1].get<std::string>());
        }
    }

    if (doc.contains("inputs")) {
        if (!doc["inputs"].is_object()) throw ParseError("field 'inputs' must be an object");
        for (auto it = doc["inputs"].begin(); it != doc["inputs"].end(); ++it) {
            const json& js = it.value();
            if (!js.is_array() || js.size() != 3)
                throw ParseError("input shape for '" + it.key() + "' must be [C, H, W]");
            TensorShape s;
            s.channels = get_count(js[0], it.key(), "inputs.C", 1);
            s.height = get_count(js[1], it.key(), "inputs.H", 1);
            s.width = get_count(js[2], it.key(), "inputs.W", 1);
            graph.set_input_shape(it.key(), s);
        }
    }

    graph.validate();
    infer_shapes(graph);  // surfaces shape errors at parse time
    return graph;
}

}  // namespace

ModelGraph parse_model(const std::string& descriptor_text) {
    json doc;
    try {
        doc = json::parse(descriptor_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("descriptor syntax error: ") + e.what());
    }
    return build_graph(doc);
}

ModelGraph parse_model(std::istream& descriptor_stream) {
    std::ostringstream buf;
    buf << descriptor_stream.rdbuf();
    return parse_model(buf.str());
}

std::string serialize_model(const ModelGraph& graph) {
    json doc;
    doc["name"] = graph.name();

    json inputs = json::object();
    for (const auto& [id, shape] : graph.input_shapes())
        inputs[id] = {shape.channels, shape.height, shape.width};
    doc["inputs"] = inputs;

    json layers = json::array();
    for (const LayerSpec& l : graph.layers()) {
        json jl;
        jl["id"] = l.id;
        jl["kind"] = to_string(l.kind);
        jl["kernel"] = {l.kernel_h, l.kernel_w};
        jl["stride"] = {l.stride_h, l.stride_w};
        jl["pad"] = {l.pad_h, l.pad_w};
        if (l.out_channels > 0) jl["out_channels"] = l.out_channels;
        jl["bytes_per_element"] = l.bytes_per_element;
        layers.push_back(jl);
    }
    doc["layers"] = layers;

    json edges = json::array();
    for (const Edge& e : graph.edges())
        edges.push_back({graph.layer(e.from).id, graph.layer(e.to).id});
    doc["edges"] = edges;

    return doc.dump(2) + "\n";
}

}  // namespace fuseplan
