#pragma once

#include <cstdint>
#include <random>

namespace seleqtl {

using Rng = std::mt19937_64;

// Stage tags keep the draws of different pipeline steps on disjoint streams.
enum class StreamTag : std::uint64_t {
    Genotype = 1,
    CausalStructure = 2,
    Expression = 3,
    StageOneRandomization = 4,
    LambdaDraws = 5,
    LassoRandomization = 6,
    OracleInstance = 7,
};

std::uint64_t splitmix64(std::uint64_t x);

// Stream for (seed, gene, stage, replicate). Adding genes or replicates never
// perturbs the draws of existing ones.
Rng make_stream(std::uint64_t seed, std::uint64_t gene_index, StreamTag tag,
                std::uint64_t replicate = 0);

} // namespace seleqtl
