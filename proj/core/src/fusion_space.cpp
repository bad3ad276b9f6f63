#include "fuseplan/fusion_space.hpp"

#include <algorithm>
#include <numeric>

#include "fuseplan/arch.hpp"
#include "fuseplan/receptive_field.hpp"

namespace fuseplan {

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

std::vector<FusionGroup> derive_groups(const ModelGraph& graph, const FusionGenome& genome) {
    if (genome.fused.size() != graph.edge_count())
        throw std::invalid_argument("genome edge count does not match graph");

    UnionFind uf(graph.node_count());
    for (std::size_t e = 0; e < graph.edge_count(); ++e)
        if (genome.is_fused(e)) uf.unite(graph.edges()[e].from, graph.edges()[e].to);

    // Component id per node, components numbered by smallest member.
    std::vector<std::size_t> comp(graph.node_count());
    std::vector<std::size_t> comp_ids;
    for (std::size_t n = 0; n < graph.node_count(); ++n) {
        std::size_t root = uf.find(n);
        if (root == n) comp_ids.push_back(n);
        comp[n] = root;
    }
    std::vector<std::size_t> comp_index(graph.node_count(), 0);
    for (std::size_t i = 0; i < comp_ids.size(); ++i) comp_index[comp_ids[i]] = i;

    std::size_t k = comp_ids.size();
    std::vector<std::vector<std::size_t>> quotient_succ(k);
    std::vector<std::size_t> indegree(k, 0);
    std::vector<std::vector<char>> seen(k);
    for (auto& row : seen) row.assign(k, 0);
    for (const Edge& e : graph.edges()) {
        std::size_t a = comp_index[comp[e.from]];
        std::size_t b = comp_index[comp[e.to]];
        if (a == b || seen[a][b]) continue;
        seen[a][b] = 1;
        quotient_succ[a].push_back(b);
        ++indegree[b];
    }

    // Kahn over the quotient. A leftover means a quotient cycle, i.e. a
    // directed path leaves some group and re-enters it.
    std::vector<std::size_t> ready;
    for (std::size_t g = 0; g < k; ++g)
        if (indegree[g] == 0) ready.push_back(g);
    std::sort(ready.begin(), ready.end());
    std::vector<std::size_t> quotient_order;
    while (!ready.empty()) {
        std::size_t g = ready.front();
        ready.erase(ready.begin());
        quotient_order.push_back(g);
        for (std::size_t s : quotient_succ[g])
            if (--indegree[s] == 0)
                ready.insert(std::upper_bound(ready.begin(), ready.end(), s), s);
    }
    if (quotient_order.size() != k) {
        // Report one edge on the cycle: any cross-group edge whose target
        // group never became ready.
        std::vector<char> emitted(k, 0);
        for (std::size_t g : quotient_order) emitted[g] = 1;
        for (const Edge& e : graph.edges()) {
            std::size_t a = comp_index[comp[e.from]];
            std::size_t b = comp_index[comp[e.to]];
            if (a != b && !emitted[a] && !emitted[b])
                throw ConvexityError(e.from, e.to,
                                     "convexity violation: a path leaves the group of '" +
                                         graph.layer(e.from).id + "' and re-enters at '" +
                                         graph.layer(e.to).id + "'");
        }
        throw ConvexityError(0, 0, "convexity violation in fused groups");
    }

    std::vector<FusionGroup> groups(k);
    std::vector<std::size_t> position(k);
    for (std::size_t i = 0; i < k; ++i) position[quotient_order[i]] = i;
    for (std::size_t n = 0; n < graph.node_count(); ++n)
        groups[position[comp_index[comp[n]]]].members.push_back(n);

    for (std::size_t i = 0; i < k; ++i) {
        FusionGroup& g = groups[i];
        g.index = i;
        g.members = topological_sort(graph, g.members);
        std::vector<char> inside(graph.node_count(), 0);
        for (std::size_t m : g.members) inside[m] = 1;
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
    }
    return groups;
}

std::vector<std::size_t> group_of_nodes(const ModelGraph& graph,
                                        const std::vector<FusionGroup>& groups) {
    std::vector<std::size_t> owner(graph.node_count(), 0);
    for (const FusionGroup& g : groups)
        for (std::size_t m : g.members) owner[m] = g.index;
    return owner;
}

std::optional<FusionGenome> apply_action(const ModelGraph& graph, const FusionGenome& genome,
                                         const Action& action) {
    if (action.edge >= genome.fused.size()) throw std::invalid_argument("action edge out of range");
    bool fused = genome.is_fused(action.edge);
    if (action.kind == ActionKind::combine && fused)
        throw std::invalid_argument("combine targets an already fused edge");
    if (action.kind == ActionKind::separate && !fused)
        throw std::invalid_argument("separate targets an already split edge");

    FusionGenome next = genome;
    next.fused[action.edge] = fused ? 0 : 1;
    try {
        derive_groups(graph, next);
    } catch (const ConvexityError&) {
        return std::nullopt;
    }
    return next;
}

GenomeValidation validate(const ModelGraph& graph, const FusionGenome& genome,
                          const ArchConfig& arch, const ShapeMap& shapes) {
    GenomeValidation result;
    std::vector<FusionGroup> groups;
    try {
        groups = derive_groups(graph, genome);
    } catch (const ConvexityError& e) {
        result.reason = e.what();
        return result;
    }

    for (FusionGroup& g : groups) {
        auto plan = max_tile_for_capacity(graph, shapes, g, arch);
        if (!plan) {
            result.reason = "group " + std::to_string(g.index) +
                            " exceeds the activation buffer even at a 1x1 sink tile";
            result.group_plans.clear();
            return result;
        }
        int64_t group_weights = 0;
        for (std::size_t m : g.members) group_weights += weight_bytes(graph, shapes, m);
        GroupPlan gp;
        gp.plan = *plan;
        gp.weights_fit = group_weights <= arch.weight_buffer_bytes;
        gp.group = std::move(g);
        result.group_plans.push_back(std::move(gp));
    }
    result.valid = true;
    return result;
}

std::vector<std::pair<std::string, std::string>> fused_edge_pairs(const ModelGraph& graph,
                                                                  const FusionGenome& genome) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t e = 0; e < graph.edge_count(); ++e)
        if (genome.is_fused(e))
            pairs.emplace_back(graph.layer(graph.edges()[e].from).id,
                               graph.layer(graph.edges()[e].to).id);
    return pairs;
}

}  // namespace fuseplan
