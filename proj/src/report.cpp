#include "serank/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

namespace serank {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open corpus file " + path.string());

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 14];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);

    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::filesystem::path resolve(const RunConfig& config, const std::filesystem::path& p) {
    if (p.empty() || p.is_absolute() || config.base_dir.empty()) return p;
    return config.base_dir / p;
}

std::vector<RelativeScore> sorted_desc(std::vector<RelativeScore> values) {
    std::stable_sort(values.begin(), values.end(),
                     [](const RelativeScore& a, const RelativeScore& b) { return a.value > b.value; });
    return values;
}

}  // namespace

std::string format_score(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

double prefix_overlap_percent(std::span<const PageId> ranking, std::span<const PageId> reference,
                              std::size_t x) {
    const std::size_t denom = std::min(x, reference.size());
    if (denom == 0) return 0.0;
    const auto ref_top = reference.first(denom);
    const auto top = ranking.first(std::min(x, ranking.size()));
    std::size_t common = 0;
    for (const auto& page : top) {
        if (std::find(ref_top.begin(), ref_top.end(), page) != ref_top.end()) ++common;
    }
    return 100.0 * static_cast<double>(common) / static_cast<double>(denom);
}

OverlapCurve overlap_curve(const ScoreTable& table, const Corpus& corpus, const EngineId& engine) {
    if (!corpus.has_engine(engine)) throw UnknownEngine(engine);
    const std::size_t a = corpus.ctr().display_length();
    OverlapCurve curve{engine.name(), std::vector<double>(a, 0.0)};
    std::size_t used = 0;
    for (std::size_t k = 0; k < table.keywords.size(); ++k) {
        const auto& consensus = table.consensus[k];
        if (consensus.empty()) continue;
        const RankingSnapshot* snap = corpus.find(engine, table.keywords[k]);
        const std::span<const PageId> results =
            snap ? std::span<const PageId>(snap->results) : std::span<const PageId>();
        for (std::size_t x = 1; x <= a; ++x)
            curve.points[x - 1] += prefix_overlap_percent(results, consensus, x);
        ++used;
    }
    if (used > 0)
        for (double& p : curve.points) p /= static_cast<double>(used);
    return curve;
}

OverlapCurve consensus_overlap_curve(const ScoreTable& table, std::size_t display_length) {
    OverlapCurve curve{std::string(kConsensusName), std::vector<double>(display_length, 0.0)};
    std::size_t used = 0;
    for (const auto& consensus : table.consensus) {
        if (consensus.empty()) continue;
        for (std::size_t x = 1; x <= display_length; ++x)
            curve.points[x - 1] += prefix_overlap_percent(consensus, consensus, x);
        ++used;
    }
    if (used > 0)
        for (double& p : curve.points) p /= static_cast<double>(used);
    return curve;
}

RelativeScores relative_scores(const ScoreTable& table) {
    RelativeScores out;
    out.consensus.engine = std::string(kConsensusName);
    out.engines.resize(table.engines.size());
    for (std::size_t j = 0; j < table.engines.size(); ++j) out.engines[j].engine = table.engines[j].name();

    for (std::size_t k = 0; k < table.keywords.size(); ++k) {
        const double c = table.consensus_scores[k];
        const std::string& keyword = table.keywords[k].text();
        if (!(c > 0.0)) {
            out.zero_consensus.push_back(keyword);
            continue;
        }
        for (std::size_t j = 0; j < table.engines.size(); ++j) {
            // Equal-score reorderings can overshoot 1 by an ulp.
            const double ratio = std::min(1.0, table.engine_scores[j][k] / c);
            out.engines[j].values.push_back({keyword, ratio});
        }
        out.consensus.values.push_back({keyword, 1.0});
    }
    for (auto& d : out.engines) d.values = sorted_desc(std::move(d.values));
    return out;
}

ExtremeQueryReport extreme_queries(const RelativeScoreDistribution& distribution, std::size_t n,
                                   Direction direction) {
    if (n == 0) throw std::invalid_argument("extreme query count must be at least 1");
    std::vector<RelativeScore> values = distribution.values;
    if (direction == Direction::Highest) {
        std::stable_sort(values.begin(), values.end(),
                         [](const auto& a, const auto& b) { return a.value > b.value; });
    } else {
        std::stable_sort(values.begin(), values.end(),
                         [](const auto& a, const auto& b) { return a.value < b.value; });
    }
    values.resize(std::min(n, values.size()));
    return {distribution.engine, direction, std::move(values)};
}

// ---------------------------------------------------------------------------
// Run configuration

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("run config: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("run config must be a JSON object");

    static const std::set<std::string> known = {"corpus",      "out_dir",        "ctr_profile",
                                                "canonicalization", "grouping", "missing_policy",
                                                "top_n"};
    for (const auto& item : j.items()) {
        if (!known.contains(item.key()))
            throw std::invalid_argument("run config: unknown field '" + item.key() + "'");
    }

    RunConfig config;
    config.base_dir = base_dir;
    try {
        if (j.contains("corpus")) config.corpus = j.at("corpus").get<std::string>();
        if (j.contains("out_dir")) config.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("ctr_profile") && !j["ctr_profile"].is_null()) {
            const auto& ctr = j["ctr_profile"];
            if (ctr.is_string()) {
                config.ctr_csv = ctr.get<std::string>();
            } else {
                config.ctr_weights = ctr.get<std::vector<double>>();
            }
        }
        if (j.contains("grouping")) config.grouping = parse_grouping_mode(j["grouping"].get<std::string>());
        if (j.contains("missing_policy"))
            config.missing = parse_missing_policy(j["missing_policy"].get<std::string>());
        if (j.contains("top_n")) {
            const auto top_n = j["top_n"].get<long long>();
            if (top_n < 1) throw std::invalid_argument("run config: top_n must be >= 1");
            config.top_n = static_cast<std::size_t>(top_n);
        }
        if (j.contains("canonicalization")) {
            const auto& c = j["canonicalization"];
            if (!c.is_object()) throw std::invalid_argument("run config: canonicalization must be an object");
            auto& p = config.canonicalization;
            const std::pair<const char*, bool*> flags[] = {
                {"lowercase_host", &p.lowercase_host},
                {"lowercase_path", &p.lowercase_path},
                {"strip_fragment", &p.strip_fragment},
                {"strip_tracking_params", &p.strip_tracking_params},
                {"strip_trailing_slash", &p.strip_trailing_slash},
                {"collapse_scheme", &p.collapse_scheme},
                {"strip_default_port", &p.strip_default_port},
                {"sort_query_params", &p.sort_query_params},
                {"strip_www", &p.strip_www},
                {"strip_page_extensions", &p.strip_page_extensions},
            };
            std::set<std::string> allowed = {"tracking_params", "page_extensions"};
            for (const auto& [name, target] : flags) {
                allowed.insert(name);
                if (c.contains(name)) *target = c[name].get<bool>();
            }
            for (const auto& item : c.items()) {
                if (!allowed.contains(item.key()))
                    throw std::invalid_argument("run config: unknown canonicalization field '" +
                                                item.key() + "'");
            }
            if (c.contains("tracking_params"))
                p.tracking_params = c["tracking_params"].get<std::vector<std::string>>();
            if (c.contains("page_extensions"))
                p.page_extensions = c["page_extensions"].get<std::vector<std::string>>();
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("run config: ") + e.what());
    }
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open run config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), path.parent_path());
}

std::string run_config_to_json(const RunConfig& config) {
    ordered_json j;
    j["corpus"] = config.corpus.generic_string();
    j["out_dir"] = config.out_dir.generic_string();
    if (config.ctr_weights) {
        j["ctr_profile"] = *config.ctr_weights;
    } else if (config.ctr_csv) {
        j["ctr_profile"] = config.ctr_csv->generic_string();
    } else {
        j["ctr_profile"] = nullptr;
    }
    const auto& p = config.canonicalization;
    ordered_json c;
    c["lowercase_host"] = p.lowercase_host;
    c["lowercase_path"] = p.lowercase_path;
    c["strip_fragment"] = p.strip_fragment;
    c["strip_tracking_params"] = p.strip_tracking_params;
    c["strip_trailing_slash"] = p.strip_trailing_slash;
    c["collapse_scheme"] = p.collapse_scheme;
    c["strip_default_port"] = p.strip_default_port;
    c["sort_query_params"] = p.sort_query_params;
    c["strip_www"] = p.strip_www;
    c["strip_page_extensions"] = p.strip_page_extensions;
    c["tracking_params"] = p.tracking_params;
    c["page_extensions"] = p.page_extensions;
    j["canonicalization"] = c;
    j["grouping"] = std::string(to_string(config.grouping));
    j["missing_policy"] = std::string(to_string(config.missing));
    j["top_n"] = config.top_n;
    return j.dump(2);
}

IngestOptions ingest_options(const RunConfig& config) {
    IngestOptions options;
    options.canonicalization = config.canonicalization;
    options.grouping = config.grouping;
    options.missing = config.missing;
    if (config.ctr_weights) {
        options.ctr = CtrProfile(*config.ctr_weights);
    } else if (config.ctr_csv) {
        options.ctr = load_ctr_csv(resolve(config, *config.ctr_csv));
    }
    return options;
}

const std::vector<std::string>& report_file_names() {
    static const std::vector<std::string> names = {
        "scores.csv",         "pvalues.csv",       "ttests.csv",      "overlap.csv",
        "relative.csv",       "extremes_high.csv", "extremes_low.csv", "consensus.jsonl",
        "run_manifest.json",
    };
    return names;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

struct Bundle {
    std::vector<std::pair<std::string, std::string>> files;  // name -> content
};

std::string scores_csv(const std::vector<ScoreSample>& samples, bool with_ci) {
    std::string out = "engine,mean,ci_half_width\n";
    for (const auto& s : samples) {
        out += csv_field(s.engine);
        out += ',';
        if (with_ci) {
            const auto ci = confidence_interval(s);
            out += format_score(ci.mean) + ',' + format_score(ci.half_width);
        } else {
            out += format_score(engine_mean_score(s.values)) + ',';
        }
        out += '\n';
    }
    return out;
}

std::string pvalues_csv(const std::vector<ScoreSample>& samples,
                        const std::vector<PairwiseTest>& tests) {
    const std::size_t count = samples.size();
    std::vector<std::vector<std::string>> cells(count, std::vector<std::string>(count));
    for (const auto& t : tests) cells[t.first][t.second] = format_pvalue(t.result.p);

    std::string out = "engine";
    for (std::size_t j = 1; j < count; ++j) out += ',' + csv_field(samples[j].engine);
    out += '\n';
    for (std::size_t i = 0; i + 1 < count; ++i) {
        out += csv_field(samples[i].engine);
        for (std::size_t j = 1; j < count; ++j) out += ',' + cells[i][j];
        out += '\n';
    }
    return out;
}

std::string ttests_csv(const std::vector<ScoreSample>& samples, const std::vector<PairwiseTest>& tests) {
    std::string out = "engine_a,engine_b,t,p,dof,exact_separation\n";
    for (const auto& t : tests) {
        out += csv_field(samples[t.first].engine) + ',' + csv_field(samples[t.second].engine) + ',' +
               format_score(t.result.t) + ',' + format_pvalue(t.result.p) + ',' +
               std::to_string(t.result.dof) + ',' + (t.result.exact_separation ? "true" : "false") +
               '\n';
    }
    return out;
}

std::string overlap_csv(const std::vector<OverlapCurve>& curves, std::size_t a) {
    std::string out = "x";
    for (const auto& c : curves) out += ',' + csv_field(c.engine);
    out += '\n';
    for (std::size_t x = 1; x <= a; ++x) {
        out += std::to_string(x);
        for (const auto& c : curves) out += ',' + format_score(c.points[x - 1]);
        out += '\n';
    }
    return out;
}

std::string relative_csv(const std::vector<const RelativeScoreDistribution*>& dists) {
    std::string out = "rank";
    std::size_t rows = 0;
    for (const auto* d : dists) {
        out += ',' + csv_field(d->engine);
        rows = std::max(rows, d->values.size());
    }
    out += '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        out += std::to_string(r + 1);
        for (const auto* d : dists) {
            out += ',';
            if (r < d->values.size()) out += format_score(d->values[r].value);
        }
        out += '\n';
    }
    return out;
}

std::string extremes_csv(const std::vector<const RelativeScoreDistribution*>& dists,
                         std::size_t top_n, Direction direction) {
    std::string out = "engine,rank,keyword,relative_score\n";
    char buf[32];
    for (const auto* d : dists) {
        const auto report = extreme_queries(*d, top_n, direction);
        for (std::size_t i = 0; i < report.entries.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.4f", report.entries[i].value);
            out += csv_field(d->engine) + ',' + std::to_string(i + 1) + ',' +
                   csv_field(report.entries[i].keyword) + ',' + buf + '\n';
        }
    }
    return out;
}

std::string consensus_jsonl(const ScoreTable& table) {
    std::string out;
    for (std::size_t k = 0; k < table.keywords.size(); ++k) {
        ordered_json j;
        j["keyword"] = table.keywords[k].text();
        j["consensus_score"] = table.consensus_scores[k];
        ordered_json ranking = ordered_json::array();
        for (const auto& page : table.consensus[k]) {
            ordered_json entry;
            entry["page"] = page.url();
            entry["score"] = table.page_scores[k].at(page);
            ranking.push_back(std::move(entry));
        }
        j["ranking"] = std::move(ranking);
        out += j.dump() + '\n';
    }
    return out;
}

void remove_report_files(const std::filesystem::path& dir) {
    std::error_code ec;
    for (const auto& name : report_file_names()) std::filesystem::remove(dir / name, ec);
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
    if (config.corpus.empty()) throw std::invalid_argument("run config has no corpus");
    if (config.out_dir.empty()) throw std::invalid_argument("run config has no out_dir");
    const auto corpus_path = resolve(config, config.corpus);
    const auto out_dir = resolve(config, config.out_dir);

    Bundle bundle;
    PipelineResult result;
    try {
        const IngestOptions options = ingest_options(config);
        LoadResult loaded = load_corpus(corpus_path, options);
        const Corpus& corpus = loaded.corpus;
        result.ingest = std::move(loaded.report);

        if (const auto violations = validate_corpus(corpus); !violations.empty()) {
            throw IngestError("corpus failed validation: " + describe(violations.front()));
        }

        const ScoreTable table = compute_scores(corpus);
        std::vector<std::string> warnings = result.ingest.warnings;

        std::vector<ScoreSample> samples;
        for (std::size_t j = 0; j < table.engines.size(); ++j)
            samples.push_back({table.engines[j].name(), table.engine_scores[j]});
        samples.push_back({std::string(kConsensusName), table.consensus_scores});

        const bool enough = corpus.keyword_count() >= 2;
        std::vector<PairwiseTest> tests;
        if (enough) {
            tests = pairwise_t_tests(samples);
        } else {
            warnings.push_back("fewer than 2 keywords: confidence intervals and t-tests omitted");
        }

        const std::size_t a = corpus.ctr().display_length();
        std::vector<OverlapCurve> curves;
        for (const auto& e : corpus.engines()) curves.push_back(overlap_curve(table, corpus, e));
        curves.push_back(consensus_overlap_curve(table, a));

        const RelativeScores rel = relative_scores(table);
        for (const auto& k : rel.zero_consensus)
            warnings.push_back("keyword '" + k + "' has consensus score 0 and is left out of relative scores");
        std::vector<const RelativeScoreDistribution*> dists;
        for (const auto& d : rel.engines) dists.push_back(&d);
        dists.push_back(&rel.consensus);

        bundle.files.emplace_back("scores.csv", scores_csv(samples, enough));
        bundle.files.emplace_back("pvalues.csv", pvalues_csv(samples, tests));
        bundle.files.emplace_back("ttests.csv", ttests_csv(samples, tests));
        bundle.files.emplace_back("overlap.csv", overlap_csv(curves, a));
        bundle.files.emplace_back("relative.csv", relative_csv(dists));
        bundle.files.emplace_back("extremes_high.csv", extremes_csv(dists, config.top_n, Direction::Highest));
        bundle.files.emplace_back("extremes_low.csv", extremes_csv(dists, config.top_n, Direction::Lowest));
        bundle.files.emplace_back("consensus.jsonl", consensus_jsonl(table));

        ordered_json manifest;
        manifest["tool"] = "serank";
        manifest["config"] = ordered_json::parse(run_config_to_json(config));
        manifest["corpus_sha256"] = sha256_file(corpus_path);
        manifest["ctr_weights"] = corpus.ctr().weights();
        std::vector<std::string> engine_names;
        for (const auto& e : corpus.engines()) engine_names.push_back(e.name());
        manifest["engines"] = engine_names;
        manifest["keywords"] = corpus.keyword_count();
        manifest["records"] = result.ingest.records;
        manifest["skipped_urls"] = result.ingest.skipped_urls.size();
        manifest["dropped_keywords"] = result.ingest.dropped_keywords;
        manifest["warnings"] = warnings;
        std::vector<std::string> names;
        for (const auto& [name, _] : bundle.files) names.push_back(name);
        names.push_back("run_manifest.json");
        manifest["files"] = names;
        bundle.files.emplace_back("run_manifest.json", manifest.dump(2) + '\n');

        std::filesystem::create_directories(out_dir);
        for (const auto& [name, content] : bundle.files) {
            const auto path = out_dir / name;
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            out << content;
            out.close();
            if (!out) throw std::runtime_error("cannot write " + path.string());
            result.files.push_back(path);
        }
    } catch (...) {
        remove_report_files(out_dir);
        throw;
    }
    return result;
}

}  // namespace serank
