#ifndef SERANK_SYNTH_HPP
#define SERANK_SYNTH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "serank/ingest.hpp"

namespace serank {

/// How one simulated engine perturbs the shared ground-truth relevance.
struct SynthEngine {
    std::string name;
    /// Std-dev of the Gaussian noise added to each page's log-relevance.
    double noise = 1.0;
    /// Copy the perturbed scores of an earlier engine instead of the truth.
    std::optional<std::string> mirror_of;
    /// Boost added to pages hosted on one of own_domains.
    double bias = 0.0;
    std::vector<std::string> own_domains;
    /// Probability that a snapshot returns fewer than a results.
    double short_list_prob = 0.0;
};

struct SynthConfig {
    std::vector<SynthEngine> engines;
    std::vector<std::string> keywords;
    std::uint64_t seed = 42;
    std::size_t pool_size = 40;
    std::size_t display_length = 10;
    /// Probability of emitting a result URL in a non-canonical spelling.
    double url_variant_prob = 0.15;
};

/// One record per (engine, keyword), engines outer. Deterministic in the
/// config: the generator only uses mt19937_64 output bits, never the
/// implementation-defined std distributions.
std::vector<RawSnapshotRecord> generate_synthetic(const SynthConfig& config);

/// Nine engines with the agreement structure of the major web engines:
/// a Bing-fed family, a Google-fed pair, an independent engine and one
/// outlier with short, noisy lists.
std::vector<SynthEngine> web_like_engines();

/// About a hundred real 2018 trending queries.
const std::vector<std::string>& sample_keywords();

SynthConfig web_like_config(std::uint64_t seed = 42);

}  // namespace serank

#endif  // SERANK_SYNTH_HPP
