#include "fuseplan/ga.hpp"

#include <algorithm>
#include <numeric>

#include "fuseplan/rng.hpp"

namespace fuseplan {

const char* to_string(Objective o) {
    switch (o) {
        case Objective::edp: return "edp";
        case Objective::energy: return "energy";
        case Objective::cycles: return "cycles";
        case Objective::dram_bytes: return "dram_bytes";
    }
    return "?";
}

Objective objective_from_string(const std::string& text) {
    if (text == "edp") return Objective::edp;
    if (text == "energy") return Objective::energy;
    if (text == "cycles") return Objective::cycles;
    if (text == "dram_bytes") return Objective::dram_bytes;
    throw ParseError("unknown objective: '" + text + "'");
}

double objective_value(const EvalResult& r, Objective o) {
    switch (o) {
        case Objective::edp: return r.edp_pj_s;
        case Objective::energy: return r.energy_pj;
        case Objective::cycles: return static_cast<double>(r.cycles);
        case Objective::dram_bytes: return static_cast<double>(r.dram.total_bytes());
    }
    return 0.0;
}

void GaParams::validate() const {
    if (population_size < 1) throw std::invalid_argument("population_size must be >= 1");
    if (elite_count < 1) throw std::invalid_argument("elite_count must be >= 1");
    if (random_survivors < 0) throw std::invalid_argument("random_survivors must be >= 0");
    if (generations < 1) throw std::invalid_argument("generations must be >= 1");
    if (mutations_per_individual < 1)
        throw std::invalid_argument("mutations_per_individual must be >= 1");
    if (elite_count + random_survivors > population_size)
        throw std::invalid_argument("elite_count + random_survivors must be <= population_size");
}

double fitness(const EvalResult& baseline, const EvalResult& candidate, Objective objective) {
    double b = objective_value(baseline, objective);
    double c = objective_value(candidate, objective);
    if (b <= 0.0) throw std::domain_error("baseline objective must be positive");
    if (c <= 0.0) throw std::domain_error("candidate objective must be positive");
    return b / c;
}

namespace {

constexpr int kMutationRetries = 16;

// One combine/separate step on a uniformly chosen edge; the flip must keep
// the grouping convex and the groups schedulable.
bool mutate_once(const ModelGraph& graph, const ShapeMap& shapes, const ArchConfig& arch,
                 FusionGenome& genome, std::mt19937_64& rng) {
    if (graph.edge_count() == 0) return false;
    for (int attempt = 0; attempt < kMutationRetries; ++attempt) {
        std::size_t edge = bounded(rng, graph.edge_count());
        Action action{genome.is_fused(edge) ? ActionKind::separate : ActionKind::combine, edge};
        auto next = apply_action(graph, genome, action);
        if (!next) continue;
        if (!validate(graph, *next, arch, shapes).valid) continue;
        genome = std::move(*next);
        return true;
    }
    return false;
}

}  // namespace

GaResult run_ga(const ModelGraph& graph, const ShapeMap& shapes, const ArchConfig& arch,
                const GaParams& params) {
    params.validate();

    FusionGenome baseline_genome = FusionGenome::all_split(graph);
    if (!validate(graph, baseline_genome, arch, shapes).valid)
        throw UnschedulableError("layerwise baseline does not fit the activation buffer");
    EvalResult baseline = evaluate_schedule(graph, shapes, baseline_genome, arch);

    GaResult result;
    result.best_genome = baseline_genome;
    result.best_eval = baseline;
    result.best_fitness = 1.0;
    result.evaluation_count = 1;

    std::size_t pop_size = static_cast<std::size_t>(params.population_size);
    std::vector<FusionGenome> population(pop_size, baseline_genome);
    std::vector<double> pop_fitness(pop_size, 1.0);

    result.history.push_back({0, 1.0, 1.0, objective_value(baseline, params.objective)});

    for (int64_t gen = 1; gen <= params.generations; ++gen) {
        for (std::size_t i = 0; i < pop_size; ++i) {
            std::mt19937_64 rng(mix_seed(params.seed, static_cast<uint64_t>(gen),
                                         static_cast<uint64_t>(i)));
            for (int64_t c = 0; c < params.mutations_per_individual; ++c)
                mutate_once(graph, shapes, arch, population[i], rng);

            EvalResult eval = evaluate_schedule(graph, shapes, population[i], arch);
            ++result.evaluation_count;
            pop_fitness[i] = fitness(baseline, eval, params.objective);
            if (pop_fitness[i] > result.best_fitness) {
                result.best_fitness = pop_fitness[i];
                result.best_genome = population[i];
                result.best_eval = eval;
            }
        }

        double mean = std::accumulate(pop_fitness.begin(), pop_fitness.end(), 0.0) /
                      static_cast<double>(pop_size);
        result.history.push_back(
            {gen, result.best_fitness, mean, objective_value(result.best_eval, params.objective)});

        // Survivor selection: top-N by fitness plus uniform random picks from
        // the rest, then refill by cloning survivors round-robin.
        std::vector<std::size_t> order(pop_size);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pop_fitness[a] > pop_fitness[b]; });
        std::size_t elites = std::min<std::size_t>(static_cast<std::size_t>(params.elite_count),
                                                   pop_size);
        std::vector<std::size_t> survivors(order.begin(),
                                           order.begin() + static_cast<std::ptrdiff_t>(elites));
        std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(elites),
                                      order.end());
        std::mt19937_64 select_rng(mix_seed(params.seed, static_cast<uint64_t>(gen), 0x5e1ec7ULL));
        for (int64_t k = 0; k < params.random_survivors && !rest.empty(); ++k) {
            std::size_t at = bounded(select_rng, rest.size());
            survivors.push_back(rest[at]);
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(at));
        }

        std::vector<FusionGenome> next;
        next.reserve(pop_size);
        for (std::size_t i = 0; next.size() < pop_size; i = (i + 1) % survivors.size())
            next.push_back(population[survivors[i]]);
        population = std::move(next);
    }
    return result;
}

std::pair<FusionGenome, EvalResult> exhaustive_oracle(const ModelGraph& graph,
                                                      const ShapeMap& shapes,
                                                      const ArchConfig& arch,
                                                      Objective objective) {
    std::size_t edges = graph.edge_count();
    if (edges > 20)
        throw std::invalid_argument("exhaustive_oracle limited to 20 edges (" +
                                    std::to_string(edges) + " given)");

    bool found = false;
    FusionGenome best_genome;
    EvalResult best_eval;
    double best_value = 0.0;

    for (uint64_t bits = 0; bits < (uint64_t{1} << edges); ++bits) {
        FusionGenome genome;
        genome.fused.resize(edges);
        for (std::size_t e = 0; e < edges; ++e) genome.fused[e] = (bits >> e) & 1 ? 1 : 0;
        if (!validate(graph, genome, arch, shapes).valid) continue;
        EvalResult eval = evaluate_schedule(graph, shapes, genome, arch);
        double value = objective_value(eval, objective);
        bool better = !found || value < best_value;
        if (found && value == best_value) {
            std::size_t a = genome.fused_count(), b = best_genome.fused_count();
            better = a < b || (a == b && std::lexicographical_compare(
                                             genome.fused.begin(), genome.fused.end(),
                                             best_genome.fused.begin(), best_genome.fused.end()));
        }
        if (better) {
            found = true;
            best_genome = std::move(genome);
            best_eval = eval;
            best_value = value;
        }
    }
    if (!found) throw UnschedulableError("no valid genome exists for this workload");
    return {best_genome, best_eval};
}

}  // namespace fuseplan
