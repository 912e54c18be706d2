// serank: command-line front end for the scoring pipeline.
//
//   serank synth  --out corpus.jsonl [--seed 42] [--keywords list.txt]
//   serank ingest --corpus raw.jsonl --out dir [--grouping ...] [--missing ...]
//   serank score  --corpus corpus.jsonl [--ctr ctr.csv]
//   serank report --config run.json [--out dir] [...overrides]
//   serank fetch  --fixtures dir --engine e --keyword k [--redirects map.json] --out corpus.jsonl

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "serank/ingest.hpp"
#include "serank/report.hpp"
#include "serank/scoring.hpp"
#include "serank/stats.hpp"
#include "serank/synth.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::string corpus;
    std::string out;
    std::string ctr;
    std::string grouping;
    std::string missing;
    std::size_t top_n = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_top_n) {
    cmd->add_option("--config", f.config, "Run-config JSON file");
    cmd->add_option("--corpus", f.corpus, "Corpus JSONL file");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--ctr", f.ctr, "CSV of position,weight overriding the default CTR profile");
    cmd->add_option("--grouping", f.grouping, "keep-all | collapse")
        ->check(CLI::IsMember({"keep-all", "collapse"}));
    cmd->add_option("--missing", f.missing, "fail | drop-keyword")
        ->check(CLI::IsMember({"fail", "drop-keyword"}));
    if (with_top_n) cmd->add_option("--top-n", f.top_n, "Entries per extreme-query report")->check(CLI::PositiveNumber);
}

serank::RunConfig make_config(const CommonFlags& f) {
    serank::RunConfig config;
    if (!f.config.empty()) config = serank::load_run_config(f.config);
    // Flags given on the command line are relative to the working directory.
    auto absolute = [](const std::string& p) { return std::filesystem::absolute(p); };
    if (!f.corpus.empty()) config.corpus = absolute(f.corpus);
    if (!f.out.empty()) config.out_dir = absolute(f.out);
    if (!f.ctr.empty()) {
        config.ctr_csv = absolute(f.ctr);
        config.ctr_weights.reset();
    }
    if (!f.grouping.empty()) config.grouping = serank::parse_grouping_mode(f.grouping);
    if (!f.missing.empty()) config.missing = serank::parse_missing_policy(f.missing);
    if (f.top_n > 0) config.top_n = f.top_n;
    return config;
}

serank::LoadResult load(const serank::RunConfig& config) {
    if (config.corpus.empty()) throw std::invalid_argument("no corpus given (--corpus or --config)");
    auto path = config.corpus;
    if (path.is_relative() && !config.base_dir.empty()) path = config.base_dir / path;
    return serank::load_corpus(path, serank::ingest_options(config));
}

void print_warnings(const serank::IngestReport& report) {
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        line = serank::trim(line);
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

int run_synth(const std::string& out, std::uint64_t seed, const std::string& keywords_file) {
    auto config = serank::web_like_config(seed);
    if (!keywords_file.empty()) config.keywords = read_lines(keywords_file);
    const auto records = serank::generate_synthetic(config);
    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + out);
    for (const auto& rec : records) file << serank::to_json_line(rec) << '\n';
    std::cerr << "wrote " << records.size() << " records to " << out << '\n';
    return 0;
}

int run_ingest(const CommonFlags& flags) {
    const auto config = make_config(flags);
    if (config.out_dir.empty()) throw std::invalid_argument("ingest needs --out");
    const auto loaded = load(config);
    print_warnings(loaded.report);
    std::filesystem::create_directories(config.out_dir);
    std::ofstream out(config.out_dir / "corpus.jsonl", std::ios::binary | std::ios::trunc);
    serank::write_corpus(loaded.corpus, out);
    std::cerr << "ingested " << loaded.corpus.engine_count() << " engines x "
              << loaded.corpus.keyword_count() << " keywords ("
              << loaded.report.skipped_urls.size() << " URLs skipped, "
              << loaded.report.dropped_keywords.size() << " keywords dropped)\n";
    return 0;
}

int run_score(const CommonFlags& flags) {
    const auto loaded = load(make_config(flags));
    print_warnings(loaded.report);
    const auto table = serank::compute_scores(loaded.corpus);
    const bool with_ci = loaded.corpus.keyword_count() >= 2;

    std::cout << "engine,mean,ci_half_width\n";
    auto row = [&](const std::string& name, const std::vector<double>& values) {
        std::cout << serank::csv_field(name) << ',';
        if (with_ci) {
            const auto ci = serank::confidence_interval({name, values});
            std::cout << serank::format_score(ci.mean) << ',' << serank::format_score(ci.half_width);
        } else {
            std::cout << serank::format_score(serank::engine_mean_score(values)) << ',';
        }
        std::cout << '\n';
    };
    for (std::size_t j = 0; j < table.engines.size(); ++j)
        row(table.engines[j].name(), table.engine_scores[j]);
    row(std::string(serank::kConsensusName), table.consensus_scores);
    return 0;
}

int run_report(const CommonFlags& flags) {
    const auto result = serank::run_pipeline(make_config(flags));
    print_warnings(result.ingest);
    for (const auto& f : result.files) std::cout << f.string() << '\n';
    return 0;
}

int run_fetch(const std::string& fixtures, const std::vector<std::string>& engines,
              const std::vector<std::string>& keywords, const std::string& redirects,
              const std::string& out) {
    std::shared_ptr<serank::FetchAdapter> adapter = std::make_shared<serank::ReplayAdapter>(fixtures);
    if (!redirects.empty()) {
        adapter = std::make_shared<serank::RedirectingAdapter>(adapter,
                                                               serank::load_redirect_map(redirects));
    }
    serank::JsonlAppender appender(out);
    for (const auto& e : engines)
        for (const auto& k : keywords)
            appender.append(serank::snapshot_via_adapter(*adapter, serank::EngineId(e), serank::Keyword(k)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Consensus ranking and scoring of search-engine result pages"};
    app.require_subcommand(1);

    std::string synth_out, synth_keywords;
    std::uint64_t seed = 42;
    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
    synth->add_option("--out", synth_out, "Output JSONL file")->required();
    synth->add_option("--seed", seed, "Random seed");
    synth->add_option("--keywords", synth_keywords, "File with one keyword per line");

    CommonFlags ingest_flags, score_flags, report_flags;
    auto* ingest = app.add_subcommand("ingest", "Canonicalize and validate a corpus");
    add_common(ingest, ingest_flags, false);
    auto* score = app.add_subcommand("score", "Print engine and consensus mean scores");
    add_common(score, score_flags, false);
    auto* report = app.add_subcommand("report", "Write the full report bundle");
    add_common(report, report_flags, true);

    std::string fixtures, redirects, fetch_out;
    std::vector<std::string> engines, keywords;
    auto* fetch = app.add_subcommand("fetch", "Replay stored snapshots into a corpus file");
    fetch->add_option("--fixtures", fixtures, "Fixture directory <engine>/<keyword>.json")->required();
    fetch->add_option("--engine", engines, "Engine name (repeatable)")->required();
    fetch->add_option("--keyword", keywords, "Keyword (repeatable)")->required();
    fetch->add_option("--redirects", redirects, "Redirect map JSON applied to result URLs");
    fetch->add_option("--out", fetch_out, "Corpus JSONL to append to")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return run_synth(synth_out, seed, synth_keywords);
        if (*ingest) return run_ingest(ingest_flags);
        if (*score) return run_score(score_flags);
        if (*report) return run_report(report_flags);
        if (*fetch) return run_fetch(fixtures, engines, keywords, redirects, fetch_out);
    } catch (const std::exception& e) {
        std::cerr << "serank: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
