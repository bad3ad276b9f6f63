#pragma once

#include <istream>
#include <string>

#include "fuseplan/model_graph.hpp"

namespace fuseplan {

/// Parses a workload descriptor. The document is JSON with fields:
///   name    : string
///   inputs  : { node id : [C, H, W] }          (graph sources only)
///   layers  : [ { id, kind, kernel:[R,S], stride:[sh,sw], pad:[ph,pw],
///                 out_channels, bytes_per_element? } ]
///   edges   : [ [from id, to id] ]
/// kernel/stride default to [1,1], pad to [0,0]; out_channels may be omitted
/// where the kind derives it. The returned graph is fully validated (DAG,
/// weakly connected, shapes consistent). Throws ParseError / ValidationError.
ModelGraph parse_model(const std::string& descriptor_text);
ModelGraph parse_model(std::istream& descriptor_stream);

/// Inverse of parse_model; parse(serialize(g)) reproduces g exactly.
std::string serialize_model(const ModelGraph& graph);

}  // namespace fuseplan
