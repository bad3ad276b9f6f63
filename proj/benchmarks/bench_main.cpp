#include <benchmark/benchmark.h>

#include "fuseplan/cost_model.hpp"
#include "fuseplan/descriptor.hpp"
#include "fuseplan/ga.hpp"
#include "fuseplan/receptive_field.hpp"
#include "fuseplan/workloads.hpp"

namespace {

using namespace fuseplan;

const ModelGraph& resnet50() {
    static ModelGraph g = parse_model(bundled_workload("resnet50"));
    return g;
}

const ShapeMap& resnet50_shapes() {
    static ShapeMap s = infer_shapes(resnet50());
    return s;
}

// Greedily fuse every edge that keeps the genome valid, in edge order.
FusionGenome greedy_fused(const ModelGraph& g, const ShapeMap& s, const ArchConfig& arch) {
    FusionGenome genome = FusionGenome::all_split(g);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        auto next = apply_action(g, genome, {ActionKind::combine, e});
        if (next && validate(g, *next, arch, s).valid) genome = std::move(*next);
    }
    return genome;
}

void BM_ParseResnet50(benchmark::State& state) {
    std::string text = bundled_workload("resnet50");
    for (auto _ : state) {
        ModelGraph g = parse_model(text);
        benchmark::DoNotOptimize(g.node_count());
    }
}
BENCHMARK(BM_ParseResnet50);

void BM_EvaluateLayerwiseResnet50(benchmark::State& state) {
    ArchConfig arch = arch_preset("simba2x2");
    for (auto _ : state) {
        EvalResult r = evaluate_layerwise(resnet50(), resnet50_shapes(), arch);
        benchmark::DoNotOptimize(r.energy_pj);
    }
}
BENCHMARK(BM_EvaluateLayerwiseResnet50);

void BM_EvaluateFusedResnet50(benchmark::State& state) {
    ArchConfig arch = arch_preset("simba2x2");
    FusionGenome genome = greedy_fused(resnet50(), resnet50_shapes(), arch);
    for (auto _ : state) {
        EvalResult r = evaluate_schedule(resnet50(), resnet50_shapes(), genome, arch);
        benchmark::DoNotOptimize(r.edp_pj_s);
    }
}
BENCHMARK(BM_EvaluateFusedResnet50);

void BM_ValidateGenomeResnet50(benchmark::State& state) {
    ArchConfig arch = arch_preset("simba2x2");
    FusionGenome genome = greedy_fused(resnet50(), resnet50_shapes(), arch);
    for (auto _ : state) {
        GenomeValidation v = validate(resnet50(), genome, arch, resnet50_shapes());
        benchmark::DoNotOptimize(v.valid);
    }
}
BENCHMARK(BM_ValidateGenomeResnet50);

void BM_BacktraceDeepGroup(benchmark::State& state) {
    // First bottleneck block fused into one group.
    const ModelGraph& g = resnet50();
    std::vector<std::size_t> members;
    for (const char* id : {"pool1", "s2b1_pw1", "s2b1_conv", "s2b1_pw2", "s2b1_proj", "s2b1_add"})
        members.push_back(g.index_of(id));
    FusionGroup group = make_group(g, members);
    for (auto _ : state) {
        TilePlan plan = backtrace_window(g, resnet50_shapes(), group, {4, 64});
        benchmark::DoNotOptimize(plan.passes);
    }
}
BENCHMARK(BM_BacktraceDeepGroup);

void BM_GaGenerationsChain16(benchmark::State& state) {
    ModelGraph g = parse_model(bundled_workload("chain16"));
    ShapeMap s = infer_shapes(g);
    ArchConfig arch = arch_preset("simba");
    GaParams p;
    p.population_size = 20;
    p.elite_count = 4;
    p.random_survivors = 2;
    p.generations = state.range(0);
    p.seed = 5;
    for (auto _ : state) {
        GaResult r = run_ga(g, s, arch, p);
        benchmark::DoNotOptimize(r.best_fitness);
    }
}
BENCHMARK(BM_GaGenerationsChain16)->Arg(5)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
