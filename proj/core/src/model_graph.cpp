#include "fuseplan/model_graph.hpp"

#include <algorithm>
#include <numeric>

#include "fuseplan/rng.hpp"

namespace fuseplan {

std::size_t ModelGraph::add_layer(LayerSpec layer) {
    if (layer.id.empty()) throw ParseError("layer with empty id");
    if (index_.count(layer.id)) throw ParseError("duplicate layer id: '" + layer.id + "'");
    if (layer.kind == LayerKind::pointwise_conv && (layer.kernel_h != 1 || layer.kernel_w != 1))
        throw ValidationError("layer '" + layer.id + "': pointwise_conv implies kernel 1x1");
    if (layer.kernel_h < 1 || layer.kernel_w < 1)
        throw ValidationError("layer '" + layer.id + "': kernel must be positive");
    if (layer.stride_h < 1 || layer.stride_w < 1)
        throw ValidationError("layer '" + layer.id + "': stride must be positive");
    if (layer.pad_h < 0 || layer.pad_w < 0)
        throw ValidationError("layer '" + layer.id + "': padding must be non-negative");
    if (layer.bytes_per_element < 1)
        throw ValidationError("layer '" + layer.id + "': bytes_per_element must be positive");
    if (layer.out_channels < 0)
        throw ValidationError("layer '" + layer.id + "': out_channels must be positive");

    std::size_t idx = nodes_.size();
    index_.emplace(layer.id, idx);
    nodes_.push_back(std::move(layer));
    preds_.emplace_back();
    succs_.emplace_back();
    in_edges_.emplace_back();
    out_edges_.emplace_back();
    return idx;
}

void ModelGraph::add_edge(const std::string& from_id, const std::string& to_id) {
    auto fit = index_.find(from_id);
    if (fit == index_.end()) throw ParseError("edge references unknown layer '" + from_id + "'");
    auto tit = index_.find(to_id);
    if (tit == index_.end()) throw ParseError("edge references unknown layer '" + to_id + "'");
    std::size_t from = fit->second, to = tit->second;
    if (from == to) throw ParseError("self-edge on layer '" + from_id + "'");
    for (std::size_t e : out_edges_[from])
        if (edges_[e].to == to) throw ParseError("duplicate edge " + from_id + " -> " + to_id);
    std::size_t e = edges_.size();
    edges_.push_back({from, to});
    succs_[from].push_back(to);
    preds_[to].push_back(from);
    out_edges_[from].push_back(e);
    in_edges_[to].push_back(e);
}

void ModelGraph::set_input_shape(const std::string& node_id, TensorShape shape) {
    if (!index_.count(node_id))
        throw ParseError("input shape references unknown layer '" + node_id + "'");
    if (!shape.valid())
        throw ValidationError("input shape for '" + node_id + "' has non-positive dimension");
    input_shapes_[node_id] = shape;
}

std::size_t ModelGraph::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("no layer named '" + id + "'");
    return it->second;
}

bool ModelGraph::has_node(const std::string& id) const { return index_.count(id) != 0; }

const std::vector<std::size_t>& ModelGraph::predecessors(std::size_t node) const {
    return preds_[node];
}
const std::vector<std::size_t>& ModelGraph::successors(std::size_t node) const {
    return succs_[node];
}
const std::vector<std::size_t>& ModelGraph::in_edges(std::size_t node) const {
    return in_edges_[node];
}
const std::vector<std::size_t>& ModelGraph::out_edges(std::size_t node) const {
    return out_edges_[node];
}

std::optional<TensorShape> ModelGraph::input_shape(std::size_t node) const {
    auto it = input_shapes_.find(nodes_[node].id);
    if (it == input_shapes_.end()) return std::nullopt;
    return it->second;
}

void ModelGraph::validate() const {
    if (nodes_.empty()) throw ParseError("descriptor has no layers");

    // Cycle check via Kahn; also catches unreachable-by-count.
    topological_sort(*this);

    // Weak connectivity over the full node set.
    std::vector<std::size_t> all(nodes_.size());
    std::iota(all.begin(), all.end(), 0);
    auto comps = weakly_connected_components(*this, all);
    if (comps.size() > 1)
        throw ParseError("graph is disconnected (" + std::to_string(comps.size()) +
                         " weakly connected components)");

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const LayerSpec& l = nodes_[i];
        bool source = preds_[i].empty();
        bool has_input_shape = input_shapes_.count(l.id) != 0;
        if (source && !has_input_shape)
            throw ValidationError("source layer '" + l.id + "' has no input shape");
        if (!source && has_input_shape)
            throw ValidationError("non-source layer '" + l.id + "' must not have an input shape");
        if (is_join_kind(l.kind)) {
            if (source)
                throw ValidationError("layer '" + l.id + "' (" + to_string(l.kind) +
                                      ") cannot be a graph source");
            if (preds_[i].size() < 2)
                throw ValidationError("layer '" + l.id + "' (" + to_string(l.kind) +
                                      ") requires >= 2 predecessors");
        } else if (!source && preds_[i].size() != 1) {
            throw ValidationError("layer '" + l.id + "' (" + to_string(l.kind) +
                                  ") requires exactly 1 predecessor");
        }
    }
}

namespace {

template <typename PickReady>
std::vector<std::size_t> kahn_sort(const ModelGraph& graph,
                                   const std::vector<std::size_t>& subset, PickReady pick) {
    std::vector<int> in_subset(graph.node_count(), 0);
    for (std::size_t n : subset) in_subset[n] = 1;

    std::vector<std::size_t> indegree(graph.node_count(), 0);
    for (std::size_t n : subset)
        for (std::size_t p : graph.predecessors(n))
            if (in_subset[p]) ++indegree[n];

    std::vector<std::size_t> ready;
    for (std::size_t n : subset)
        if (indegree[n] == 0) ready.push_back(n);
    std::sort(ready.begin(), ready.end());

    std::vector<std::size_t> order;
    order.reserve(subset.size());
    while (!ready.empty()) {
        std::size_t at = pick(ready.size());
        std::size_t n = ready[at];
        ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(at));
        order.push_back(n);
        for (std::size_t s : graph.successors(n)) {
            if (!in_subset[s]) continue;
            if (--indegree[s] == 0) {
                // Keep the ready list sorted so index picks are reproducible.
                ready.insert(std::upper_bound(ready.begin(), ready.end(), s), s);
            }
        }
    }
    if (order.size() != subset.size()) throw ParseError("cycle detected in layer graph");
    return order;
}

}  // namespace

std::vector<std::size_t> topological_sort(const ModelGraph& graph,
                                          const std::vector<std::size_t>& subset) {
    return kahn_sort(graph, subset, [](std::size_t) { return std::size_t{0}; });
}

std::vector<std::size_t> topological_sort(const ModelGraph& graph) {
    std::vector<std::size_t> all(graph.node_count());
    std::iota(all.begin(), all.end(), 0);
    return topological_sort(graph, all);
}

std::vector<std::size_t> topological_sort_random(const ModelGraph& graph,
                                                 const std::vector<std::size_t>& subset,
                                                 std::mt19937_64& rng) {
    return kahn_sort(graph, subset, [&rng](std::size_t n) { return bounded(rng, n); });
}

std::vector<std::size_t> topological_sort_random(const ModelGraph& graph, std::mt19937_64& rng) {
    std::vector<std::size_t> all(graph.node_count());
    std::iota(all.begin(), all.end(), 0);
    return topological_sort_random(graph, all, rng);
}

std::vector<std::vector<std::size_t>> weakly_connected_components(
    const ModelGraph& graph, const std::vector<std::size_t>& subset) {
    std::vector<int> in_subset(graph.node_count(), 0);
    for (std::size_t n : subset) in_subset[n] = 1;
    std::vector<int> seen(graph.node_count(), 0);

    std::vector<std::size_t> sorted(subset);
    std::sort(sorted.begin(), sorted.end());

    std::vector<std::vector<std::size_t>> components;
    for (std::size_t start : sorted) {
        if (seen[start]) continue;
        std::vector<std::size_t> comp, stack{start};
        seen[start] = 1;
        while (!stack.empty()) {
            std::size_t n = stack.back();
            stack.pop_back();
            comp.push_back(n);
            auto visit = [&](std::size_t m) {
                if (in_subset[m] && !seen[m]) {
                    seen[m] = 1;
                    stack.push_back(m);
                }
            };
            for (std::size_t p : graph.predecessors(n)) visit(p);
            for (std::size_t s : graph.successors(n)) visit(s);
        }
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
    }
    return components;
}

}  // namespace fuseplan
