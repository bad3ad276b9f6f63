#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fuseplan/cost_model.hpp"
#include "fuseplan/fusion_space.hpp"

namespace fuseplan {

enum class Objective { edp, energy, cycles, dram_bytes };

const char* to_string(Objective o);
Objective objective_from_string(const std::string& text);
double objective_value(const EvalResult& r, Objective o);

struct GaParams {
    int64_t population_size = 100;
    int64_t elite_count = 10;
    int64_t random_survivors = 5;
    int64_t generations = 500;
    int64_t mutations_per_individual = 1;
    uint64_t seed = 0;
    Objective objective = Objective::edp;

    void validate() const;  // throws std::invalid_argument
};

struct GenerationRecord {
    int64_t generation = 0;
    double best_fitness = 0.0;  // best ever seen up to this generation
    double mean_fitness = 0.0;  // mean over the current population
    double best_objective_value = 0.0;
};

struct GaResult {
    FusionGenome best_genome;
    EvalResult best_eval;
    double best_fitness = 0.0;
    std::vector<GenerationRecord> history;  // generation 0 is the baseline
    int64_t evaluation_count = 0;
};

/// Fitness F = baseline objective / candidate objective; > 1 means the
/// candidate beats the layerwise schedule.
double fitness(const EvalResult& baseline, const EvalResult& candidate, Objective objective);

/// Mutation-only GA over fused/split genomes. The population starts as
/// population_size copies of the all-split schedule; every generation each
/// individual receives mutations_per_individual random valid combine/
/// separate actions (invalid mutants are resampled a bounded number of
/// times, then left unmutated), survivors are the elite_count fittest plus
/// random_survivors uniform picks from the rest, cloned back up to
/// population_size. The returned best is the best individual ever
/// evaluated, so its fitness is always >= 1. Mutation randomness is derived
/// from (seed, generation, individual), making the result independent of
/// evaluation order. Throws UnschedulableError if the layerwise baseline
/// itself is infeasible.
GaResult run_ga(const ModelGraph& graph, const ShapeMap& shapes, const ArchConfig& arch,
                const GaParams& params);

/// Enumerates all 2^edges genomes (edge count <= 20), skipping invalid ones,
/// and returns the objective minimizer. Ties prefer fewer fused edges, then
/// the lexicographically smaller edge-state vector.
std::pair<FusionGenome, EvalResult> exhaustive_oracle(const ModelGraph& graph,
                                                      const ShapeMap& shapes,
                                                      const ArchConfig& arch,
                                                      Objective objective);

}  // namespace fuseplan
