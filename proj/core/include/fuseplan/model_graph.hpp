#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fuseplan/layer.hpp"

namespace fuseplan {

/// Directed activation edge between two layers, by node index.
struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// A CNN workload as a DAG of layers.
///
/// Node and edge order is the descriptor order and is stable: fusion genomes
/// index edges by position. Invariants (checked by validate(), which
/// parse_model always runs): the graph is a DAG, weakly connected, every
/// source node has an input shape, and shape inference succeeds.
class ModelGraph {
  public:
    ModelGraph() = default;

    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    std::size_t add_layer(LayerSpec layer);
    void add_edge(const std::string& from_id, const std::string& to_id);
    void set_input_shape(const std::string& node_id, TensorShape shape);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const LayerSpec& layer(std::size_t index) const { return nodes_[index]; }
    const std::vector<LayerSpec>& layers() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }

    std::size_t index_of(const std::string& id) const;
    bool has_node(const std::string& id) const;

    /// Predecessor node indices in edge-insertion order (operand order).
    const std::vector<std::size_t>& predecessors(std::size_t node) const;
    const std::vector<std::size_t>& successors(std::size_t node) const;

    /// Edge indices entering / leaving a node, in edge-insertion order.
    const std::vector<std::size_t>& in_edges(std::size_t node) const;
    const std::vector<std::size_t>& out_edges(std::size_t node) const;

    bool is_source(std::size_t node) const { return preds_[node].empty(); }
    bool is_sink(std::size_t node) const { return succs_[node].empty(); }

    const std::map<std::string, TensorShape>& input_shapes() const { return input_shapes_; }
    std::optional<TensorShape> input_shape(std::size_t node) const;

    /// Structural validation: DAG, weak connectivity, join arities,
    /// input shapes present exactly on sources. Throws ParseError or
    /// ValidationError.
    void validate() const;

  private:
    std::string name_;
    std::vector<LayerSpec> nodes_;
    std::vector<Edge> edges_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, TensorShape> input_shapes_;
    std::vector<std::vector<std::size_t>> preds_;
    std::vector<std::vector<std::size_t>> succs_;
    std::vector<std::vector<std::size_t>> in_edges_;
    std::vector<std::vector<std::size_t>> out_edges_;
};

/// Deterministic topological order over a node subset (ready nodes taken in
/// ascending index order). Throws ParseError on a cycle.
std::vector<std::size_t> topological_sort(const ModelGraph& graph,
                                          const std::vector<std::size_t>& subset);
std::vector<std::size_t> topological_sort(const ModelGraph& graph);

/// Topological order with ties broken uniformly at random among ready nodes.
/// The rng is the only source of nondeterminism.
std::vector<std::size_t> topological_sort_random(const ModelGraph& graph,
                                                 const std::vector<std::size_t>& subset,
                                                 std::mt19937_64& rng);
std::vector<std::size_t> topological_sort_random(const ModelGraph& graph, std::mt19937_64& rng);

/// Weakly connected components of the subgraph induced by `subset`,
/// ignoring edge direction. Components are ordered by smallest member index,
/// members ascending.
std::vector<std::vector<std::size_t>> weakly_connected_components(
    const ModelGraph& graph, const std::vector<std::size_t>& subset);

}  // namespace fuseplan
