#ifndef SERANK_REPORT_HPP
#define SERANK_REPORT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "serank/ingest.hpp"
#include "serank/scoring.hpp"
#include "serank/stats.hpp"

namespace serank {

/// Name used for the consensus pseudo-engine in every report.
inline constexpr std::string_view kConsensusName = "consensus";

struct OverlapCurve {
    std::string engine;
    /// points[x - 1]: mean over keywords of the percentage of the engine's
    /// top-x links found in the consensus top-x.
    std::vector<double> points;
};

/// Keywords whose consensus list is empty carry no information and are left
/// out of the average. Throws UnknownEngine.
OverlapCurve overlap_curve(const ScoreTable& table, const Corpus& corpus, const EngineId& engine);
/// The consensus against itself.
OverlapCurve consensus_overlap_curve(const ScoreTable& table, std::size_t display_length);

/// Percentage of top_x(ranking) that lies in top_x(reference), with the
/// denominator capped at the reference length.
double prefix_overlap_percent(std::span<const PageId> ranking, std::span<const PageId> reference,
                              std::size_t x);

struct RelativeScore {
    std::string keyword;
    double value = 0.0;
};

struct RelativeScoreDistribution {
    std::string engine;
    /// Sorted descending; ties keep corpus keyword order.
    std::vector<RelativeScore> values;
};

struct RelativeScores {
    std::vector<RelativeScoreDistribution> engines;  // corpus engine order
    RelativeScoreDistribution consensus;
    /// Keywords dropped because the consensus score is 0.
    std::vector<std::string> zero_consensus;
};

RelativeScores relative_scores(const ScoreTable& table);

enum class Direction { Highest, Lowest };

struct ExtremeQueryReport {
    std::string engine;
    Direction direction = Direction::Highest;
    std::vector<RelativeScore> entries;
};

/// The n largest (descending) or smallest (ascending) relative scores.
/// n larger than the sample returns everything. Throws std::invalid_argument
/// for n == 0.
ExtremeQueryReport extreme_queries(const RelativeScoreDistribution& distribution, std::size_t n,
                                   Direction direction);

/// Run configuration; relative paths are resolved against base_dir.
struct RunConfig {
    std::filesystem::path corpus;
    std::filesystem::path out_dir;
    std::optional<std::vector<double>> ctr_weights;
    std::optional<std::filesystem::path> ctr_csv;
    CanonicalizationPolicy canonicalization;
    GroupingMode grouping = GroupingMode::KeepAll;
    MissingPolicy missing = MissingPolicy::Fail;
    std::size_t top_n = 10;
    std::filesystem::path base_dir;
};

/// Parses the JSON run-config; unknown fields are rejected.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& config);

IngestOptions ingest_options(const RunConfig& config);

/// Report files written by run_pipeline, in write order.
const std::vector<std::string>& report_file_names();

struct PipelineResult {
    IngestReport ingest;
    std::vector<std::filesystem::path> files;
};

/// Ingest, score, test and write the report bundle into config.out_dir.
/// On failure no report file is left behind and the exception propagates.
PipelineResult run_pipeline(const RunConfig& config);

// Formatting helpers shared with the CLI.
std::string format_score(double value);   // 6 significant digits
std::string csv_field(std::string_view text);

}  // namespace serank

#endif  // SERANK_REPORT_HPP
