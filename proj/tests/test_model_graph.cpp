#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "fuseplan/descriptor.hpp"
#include "fuseplan/workloads.hpp"
#include "helpers.hpp"

using namespace fuseplan;
using namespace fuseplan::test;

TEST_CASE("parse: minimal single-layer descriptor") {
    ModelGraph g = parse_model(R"({
        "name": "single",
        "inputs": {"a": [3, 8, 8]},
        "layers": [{"id": "a", "kind": "conv", "kernel": [3,3], "pad": [1,1], "out_channels": 4}],
        "edges": []
    })");
    CHECK(g.node_count() == 1);
    CHECK(g.edge_count() == 0);
    CHECK(g.layer(0).kind == LayerKind::conv);
}

TEST_CASE("parse: two-node cycle is rejected") {
    CHECK_THROWS_WITH_AS(parse_model(R"({
        "inputs": {},
        "layers": [{"id": "a", "kind": "conv", "out_channels": 4},
                   {"id": "b", "kind": "conv", "out_channels": 4}],
        "edges": [["b", "a"], ["a", "b"]]
    })"),
                         doctest::Contains("cycle"), ParseError);
}

TEST_CASE("parse: 16-layer chain has 15 fusion boundaries") {
    ModelGraph g = parse_model(bundled_workload("chain16"));
    CHECK(g.node_count() == 16);
    // One fused/split bit per edge: state space 2^15 for a 16-layer chain.
    CHECK(g.edge_count() == 15);
}

TEST_CASE("parse: error cases are diagnosed") {
    CHECK_THROWS_AS(parse_model("{not json"), ParseError);
    CHECK_THROWS_WITH_AS(parse_model(R"({
        "inputs": {"a": [1,4,4]},
        "layers": [{"id": "a", "kind": "swizzle", "out_channels": 2}],
        "edges": []
    })"),
                         doctest::Contains("unknown layer kind"), ParseError);
    CHECK_THROWS_WITH_AS(parse_model(R"({
        "inputs": {"a": [1,4,4]},
        "layers": [{"id": "a", "kind": "conv", "out_channels": 2}],
        "edges": [["a", "ghost"]]
    })"),
                         doctest::Contains("unknown layer"), ParseError);
    CHECK_THROWS_WITH_AS(parse_model(R"({
        "inputs": {"a": [1,4,4], "b": [1,4,4]},
        "layers": [{"id": "a", "kind": "conv", "out_channels": 2},
                   {"id": "b", "kind": "conv", "out_channels": 2}],
        "edges": []
    })"),
                         doctest::Contains("disconnected"), ParseError);
    CHECK_THROWS_WITH_AS(parse_model(R"({
        "inputs": {"a": [1,4,4]},
        "layers": [{"id": "a", "kind": "pointwise_conv", "kernel": [3,3], "out_channels": 2}],
        "edges": []
    })"),
                         doctest::Contains("pointwise"), ValidationError);
    // Input shapes belong to graph sources only.
    CHECK_THROWS_WITH_AS(parse_model(R"({
        "inputs": {"a": [1,4,4], "b": [1,4,4]},
        "layers": [{"id": "a", "kind": "conv", "out_channels": 2},
                   {"id": "b", "kind": "conv", "out_channels": 2}],
        "edges": [["a", "b"]]
    })"),
                         doctest::Contains("non-source"), ValidationError);
}

TEST_CASE("infer_shapes: spatial formula") {
    SUBCASE("same-padding identity: 56 -> 56") {
        ModelGraph g = make_chain({{3, 1, 1, 8}}, 8, 56);
        ShapeMap s = infer_shapes(g);
        CHECK(s.output(0) == TensorShape{8, 56, 56});
    }
    SUBCASE("stride 2: floor((56+2-3)/2)+1 = 28") {
        ModelGraph g = make_chain({{3, 2, 1, 8}}, 8, 56);
        ShapeMap s = infer_shapes(g);
        CHECK(s.output(0) == TensorShape{8, 28, 28});
    }
    SUBCASE("pointwise preserves spatial dims: 16 -> 64 channels on 28x28") {
        ModelGraph g;
        LayerSpec l;
        l.id = "pw";
        l.kind = LayerKind::pointwise_conv;
        l.out_channels = 64;
        g.add_layer(l);
        g.set_input_shape("pw", {16, 28, 28});
        g.validate();
        ShapeMap s = infer_shapes(g);
        CHECK(s.output(0) == TensorShape{64, 28, 28});
    }
    SUBCASE("kernel larger than padded input errors") {
        ModelGraph g;
        LayerSpec l;
        l.id = "c";
        l.kind = LayerKind::conv;
        l.kernel_h = l.kernel_w = 7;
        l.out_channels = 2;
        g.add_layer(l);
        g.set_input_shape("c", {1, 4, 4});
        g.validate();
        CHECK_THROWS_AS(infer_shapes(g), ValidationError);
    }
    SUBCASE("elementwise_add operand mismatch errors") {
        CHECK_THROWS_WITH_AS(parse_model(R"({
            "inputs": {"a": [4, 8, 8]},
            "layers": [{"id": "a", "kind": "conv", "kernel": [1,1], "out_channels": 4},
                       {"id": "b", "kind": "conv", "kernel": [1,1], "out_channels": 8},
                       {"id": "c", "kind": "conv", "kernel": [1,1], "out_channels": 4},
                       {"id": "d", "kind": "elementwise_add"}],
            "edges": [["a","b"],["a","c"],["b","d"],["c","d"]]
        })"),
                             doctest::Contains("operand shapes differ"), ValidationError);
    }
}

TEST_CASE("topological_sort_random: chain is unique for every seed") {
    ModelGraph g = make_uniform_chain(3);
    for (uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(seed);
        auto order = topological_sort_random(g, rng);
        CHECK(order == std::vector<std::size_t>{0, 1, 2});
    }
}

namespace {

bool is_valid_topo_order(const ModelGraph& g, const std::vector<std::size_t>& order) {
    std::vector<std::size_t> pos(g.node_count());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const Edge& e : g.edges())
        if (pos[e.from] >= pos[e.to]) return false;
    return true;
}

// Enumerates every valid topological order by brute force over permutations.
std::set<std::vector<std::size_t>> all_topo_orders(const ModelGraph& g) {
    std::vector<std::size_t> perm(g.node_count());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::set<std::vector<std::size_t>> valid;
    do {
        if (is_valid_topo_order(g, perm)) valid.insert(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return valid;
}

}  // namespace

TEST_CASE("topological_sort_random: diamond produces both valid sorts over 100 seeds") {
    ModelGraph g = make_diamond();
    auto valid = all_topo_orders(g);
    CHECK(valid.size() == 2);  // a,b,c,d and a,c,b,d

    std::set<std::vector<std::size_t>> seen;
    for (uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        auto order = topological_sort_random(g, rng);
        CHECK(valid.count(order) == 1);
        seen.insert(order);
    }
    CHECK(seen.size() >= 2);  // randomization is live
}

TEST_CASE("topological_sort_random: residual add node is always last") {
    ModelGraph g = make_residual();
    for (uint64_t seed = 0; seed < 50; ++seed) {
        std::mt19937_64 rng(seed);
        auto order = topological_sort_random(g, rng);
        CHECK(is_valid_topo_order(g, order));
        CHECK(order.back() == g.index_of("d"));
    }
}

TEST_CASE("topological_sort_random: every output passes the predecessor-precedes check") {
    ModelGraph g = make_residual();
    ModelGraph unet = parse_model(bundled_workload("unet_small"));
    for (uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        CHECK(is_valid_topo_order(g, topological_sort_random(g, rng)));
        CHECK(is_valid_topo_order(unet, topological_sort_random(unet, rng)));
    }
}

TEST_CASE("weakly_connected_components") {
    ModelGraph chain = make_uniform_chain(3);
    SUBCASE("adjacent pair stays connected") {
        auto comps = weakly_connected_components(chain, {0, 1});
        REQUIRE(comps.size() == 1);
        CHECK(comps[0] == std::vector<std::size_t>{0, 1});
    }
    SUBCASE("endpoints without the middle split apart") {
        auto comps = weakly_connected_components(chain, {0, 2});
        REQUIRE(comps.size() == 2);
        CHECK(comps[0] == std::vector<std::size_t>{0});
        CHECK(comps[1] == std::vector<std::size_t>{2});
    }
    SUBCASE("skip edge joins the ends of a residual block") {
        ModelGraph res = make_residual();
        auto comps =
            weakly_connected_components(res, {res.index_of("a"), res.index_of("d")});
        REQUIRE(comps.size() == 1);  // joined by the a->d skip edge
        CHECK(comps[0].size() == 2);
    }
    SUBCASE("empty subset gives empty list") {
        CHECK(weakly_connected_components(chain, {}).empty());
    }
}

TEST_CASE("activation_footprints") {
    SUBCASE("bytes are the element product") {
        ModelGraph g = make_chain({{3, 1, 1, 256}}, 8, 56);
        ShapeMap s = infer_shapes(g);
        auto rows = activation_footprints(g, s);
        CHECK(rows[0].output_bytes == 256 * 56 * 56);  // 802816
    }
    SUBCASE("elementwise_add sums both operands") {
        ModelGraph g = make_diamond(64, 28);
        ShapeMap s = infer_shapes(g);
        auto rows = activation_footprints(g, s);
        CHECK(rows[g.index_of("d")].input_bytes == 2 * 64 * 28 * 28);  // 2 x 50176
    }
    SUBCASE("resnet50 early layers exceed the 128 KiB Eyeriss activation buffer") {
        ModelGraph g = parse_model(bundled_workload("resnet50"));
        ShapeMap s = infer_shapes(g);
        auto rows = activation_footprints(g, s);
        CHECK(rows[0].output_bytes > 128 * 1024);  // conv1: 64x112x112
        int early_over = 0;
        for (std::size_t i = 0; i < 10; ++i)
            if (rows[i].output_bytes > 128 * 1024) ++early_over;
        CHECK(early_over >= 5);
    }
}

TEST_CASE("descriptor round-trip: parse(serialize(g)) == g") {
    for (const std::string& name : bundled_workload_names()) {
        ModelGraph g = parse_model(bundled_workload(name));
        ModelGraph h = parse_model(serialize_model(g));
        REQUIRE(h.node_count() == g.node_count());
        REQUIRE(h.edge_count() == g.edge_count());
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            CHECK(h.layer(i).id == g.layer(i).id);
            CHECK(h.layer(i).kind == g.layer(i).kind);
            CHECK(h.layer(i).kernel_h == g.layer(i).kernel_h);
            CHECK(h.layer(i).stride_h == g.layer(i).stride_h);
            CHECK(h.layer(i).pad_h == g.layer(i).pad_h);
            CHECK(h.layer(i).out_channels == g.layer(i).out_channels);
        }
        CHECK(h.edges() == g.edges());
        CHECK(h.input_shapes() == g.input_shapes());
        // Serialization itself is a fixpoint.
        CHECK(serialize_model(h) == serialize_model(g));
    }
}

TEST_CASE("infer_shapes is deterministic and total on bundled workloads") {
    for (const std::string& name : bundled_workload_names()) {
        ModelGraph g = parse_model(bundled_workload(name));
        ShapeMap a = infer_shapes(g);
        ShapeMap b = infer_shapes(g);
        REQUIRE(a.per_node.size() == b.per_node.size());
        for (std::size_t i = 0; i < a.per_node.size(); ++i) {
            CHECK(a.at(i).output == b.at(i).output);
            CHECK(a.at(i).inputs == b.at(i).inputs);
            CHECK(a.at(i).output.valid());
        }
    }
}

TEST_CASE("bundled descriptors have the expected structure") {
    ModelGraph resnet = parse_model(bundled_workload("resnet50"));
    CHECK(resnet.node_count() > 50);
    ShapeMap rs = infer_shapes(resnet);
    CHECK(rs.output(resnet.index_of("s5b3_add")) == TensorShape{2048, 7, 7});
    CHECK(rs.output(resnet.index_of("s2b1_conv")) == TensorShape{64, 56, 56});

    ModelGraph mobilenet = parse_model(bundled_workload("mobilenetv3_small"));
    ShapeMap ms = infer_shapes(mobilenet);
    CHECK(ms.output(mobilenet.index_of("head_fc2")) == TensorShape{1000, 1, 1});

    ModelGraph unet = parse_model(bundled_workload("unet_small"));
    ShapeMap us = infer_shapes(unet);
    // Decoder restores the input resolution through the skip concats.
    CHECK(us.output(unet.index_of("out")) == TensorShape{2, 64, 64});
}
