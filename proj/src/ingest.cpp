#include "serank/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace serank {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<PageId> dedup_keep_earliest(std::vector<PageId> pages) {
    std::set<PageId> seen;
    std::vector<PageId> out;
    out.reserve(pages.size());
    for (auto& p : pages) {
        if (seen.insert(p).second) out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

std::string to_json_line(const RawSnapshotRecord& record) {
    ordered_json j;
    j["engine"] = record.engine;
    j["keyword"] = record.keyword;
    j["captured_at"] = record.captured_at ? ordered_json(*record.captured_at) : ordered_json(nullptr);
    j["results"] = record.results;
    return j.dump();
}

RawSnapshotRecord parse_record(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("record must be a JSON object");

    static const std::set<std::string> known = {"engine", "keyword", "captured_at", "results"};
    for (const auto& item : j.items()) {
        if (!known.contains(item.key()))
            throw std::invalid_argument("unexpected field '" + item.key() + "'");
    }

    RawSnapshotRecord rec;
    if (!j.contains("engine") || !j["engine"].is_string())
        throw std::invalid_argument("'engine' must be a string");
    if (!j.contains("keyword") || !j["keyword"].is_string())
        throw std::invalid_argument("'keyword' must be a string");
    if (!j.contains("results") || !j["results"].is_array())
        throw std::invalid_argument("'results' must be an array");
    rec.engine = j["engine"].get<std::string>();
    rec.keyword = j["keyword"].get<std::string>();
    if (trim(rec.engine).empty()) throw std::invalid_argument("'engine' is empty");
    if (trim(rec.keyword).empty()) throw std::invalid_argument("'keyword' is empty");

    if (j.contains("captured_at") && !j["captured_at"].is_null()) {
        if (!j["captured_at"].is_string())
            throw std::invalid_argument("'captured_at' must be a string or null");
        rec.captured_at = j["captured_at"].get<std::string>();
    }

    const auto& results = j["results"];
    if (results.size() > kMaxRawResults)
        throw std::invalid_argument("more than " + std::to_string(kMaxRawResults) + " results");
    rec.results.reserve(results.size());
    for (const auto& r : results) {
        if (!r.is_string()) throw std::invalid_argument("'results' entries must be strings");
        rec.results.push_back(r.get<std::string>());
    }
    return rec;
}

std::string_view to_string(MissingPolicy policy) noexcept {
    return policy == MissingPolicy::Fail ? "fail" : "drop-keyword";
}

MissingPolicy parse_missing_policy(std::string_view text) {
    if (text == "fail") return MissingPolicy::Fail;
    if (text == "drop-keyword") return MissingPolicy::DropKeyword;
    throw std::invalid_argument("unknown missing-snapshot policy: " + std::string(text));
}

LoadResult build_corpus(const std::vector<RawSnapshotRecord>& records, const IngestOptions& options,
                        const std::vector<std::size_t>& line_numbers) {
    IngestReport report;
    report.records = records.size();
    report.warnings = options.ctr.warnings();

    std::vector<EngineId> engines;
    std::vector<Keyword> keywords;
    std::map<SnapshotKey, RankingSnapshot> snapshots;
    const std::size_t a = options.ctr.display_length();

    for (std::size_t i = 0; i < records.size(); ++i) {
        const RawSnapshotRecord& rec = records[i];
        const std::size_t line = i < line_numbers.size() ? line_numbers[i] : i + 1;

        std::optional<EngineId> engine;
        std::optional<Keyword> keyword;
        try {
            engine.emplace(rec.engine);
            keyword.emplace(rec.keyword);
        } catch (const std::invalid_argument& e) {
            throw MalformedRecord(line, e.what());
        }
        if (rec.results.size() > kMaxRawResults)
            throw MalformedRecord(line, "more than " + std::to_string(kMaxRawResults) + " results");

        std::vector<PageId> pages;
        pages.reserve(rec.results.size());
        for (const auto& url : rec.results) {
            try {
                pages.push_back(canonical_url(url, options.canonicalization));
            } catch (const MalformedUrl& e) {
                report.skipped_urls.push_back({line, url, e.what()});
                report.warnings.push_back("line " + std::to_string(line) + ": skipped " + e.what());
            }
        }
        pages = group_subpages(dedup_keep_earliest(std::move(pages)), options.grouping);
        if (pages.size() > a) {
            report.warnings.push_back("line " + std::to_string(line) + ": kept the first " +
                                      std::to_string(a) + " of " + std::to_string(pages.size()) +
                                      " results");
            pages.resize(a);
        }

        if (std::find(engines.begin(), engines.end(), *engine) == engines.end())
            engines.push_back(*engine);
        if (std::find(keywords.begin(), keywords.end(), *keyword) == keywords.end())
            keywords.push_back(*keyword);

        SnapshotKey key{*engine, *keyword};
        RankingSnapshot snap{*engine, *keyword, std::move(pages), rec.captured_at};
        auto [it, inserted] = snapshots.insert_or_assign(std::move(key), std::move(snap));
        if (!inserted) {
            report.warnings.push_back("line " + std::to_string(line) + ": duplicate record for (" +
                                      engine->name() + ", " + keyword->text() +
                                      "), the later record wins");
        }
    }

    std::vector<Keyword> kept;
    for (const auto& k : keywords) {
        const auto missing = std::find_if(engines.begin(), engines.end(), [&](const EngineId& e) {
            return !snapshots.contains({e, k});
        });
        if (missing == engines.end()) {
            kept.push_back(k);
            continue;
        }
        if (options.missing == MissingPolicy::Fail) throw MissingSnapshot(missing->name(), k.text());
        report.dropped_keywords.push_back(k.text());
        report.warnings.push_back("dropped keyword '" + k.text() + "': no snapshot from engine " +
                                  missing->name());
        for (const auto& e : engines) snapshots.erase({e, k});
    }

    if (engines.empty() || kept.empty()) throw EmptyCorpus();
    return {Corpus(std::move(engines), std::move(kept), std::move(snapshots), options.ctr),
            std::move(report)};
}

LoadResult load_corpus(std::istream& in, const IngestOptions& options) {
    std::vector<RawSnapshotRecord> records;
    std::vector<std::size_t> lines;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (trim(text).empty()) continue;
        try {
            records.push_back(parse_record(text));
        } catch (const std::invalid_argument& e) {
            throw MalformedRecord(line, e.what());
        }
        lines.push_back(line);
    }
    if (records.empty()) throw EmptyCorpus();
    return build_corpus(records, options, lines);
}

LoadResult load_corpus(const std::filesystem::path& path, const IngestOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open corpus file " + path.string());
    return load_corpus(in, options);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& e : corpus.engines()) {
        for (const auto& k : corpus.keywords()) {
            const RankingSnapshot* snap = corpus.find(e, k);
            if (snap == nullptr) continue;
            RawSnapshotRecord rec{e.name(), k.text(), snap->captured_at, {}};
            rec.results.reserve(snap->results.size());
            for (const auto& p : snap->results) rec.results.push_back(p.url());
            out << to_json_line(rec) << '\n';
        }
    }
}

CtrProfile load_ctr_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open CTR file " + path.string());
    std::vector<double> weights;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (lineno == 1 && trim(line) == "position,weight") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("CTR file line " + std::to_string(lineno) +
                                        ": expected 'position,weight'");
        std::size_t position = 0;
        double weight = 0.0;
        try {
            position = std::stoul(trim(line.substr(0, comma)));
            weight = std::stod(trim(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw std::invalid_argument("CTR file line " + std::to_string(lineno) +
                                        ": not a number");
        }
        if (position != weights.size() + 1)
            throw std::invalid_argument("CTR file line " + std::to_string(lineno) +
                                        ": positions must run 1, 2, 3, ...");
        weights.push_back(weight);
    }
    return CtrProfile(std::move(weights));
}

std::string_view FetchError::kind_name(Kind kind) noexcept {
    switch (kind) {
        case Kind::UnknownEngine: return "UnknownEngine";
        case Kind::UnknownKeyword: return "UnknownKeyword";
        case Kind::Io: return "Io";
        case Kind::Malformed: return "Malformed";
        case Kind::Other: return "Other";
    }
    return "Other";
}

std::string url_encode_component(std::string_view text) {
    static constexpr char digits[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += digits[c >> 4];
            out += digits[c & 0xF];
        }
    }
    return out;
}

std::filesystem::path ReplayAdapter::path_for(const EngineId& engine, const Keyword& keyword) const {
    return root_ / engine.name() / (url_encode_component(keyword.text()) + ".json");
}

RawSnapshotRecord ReplayAdapter::fetch(const EngineId& engine, const Keyword& keyword) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root_ / engine.name()))
        throw FetchError(FetchError::Kind::UnknownEngine, engine.name(), keyword.text(),
                         "no fixture directory " + (root_ / engine.name()).string());
    const fs::path file = path_for(engine, keyword);
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw FetchError(FetchError::Kind::UnknownKeyword, engine.name(), keyword.text(),
                         "no fixture " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();

    RawSnapshotRecord rec;
    try {
        rec = parse_record(buf.str());
    } catch (const std::invalid_argument& e) {
        throw FetchError(FetchError::Kind::Malformed, engine.name(), keyword.text(), e.what());
    }
    if (EngineId(rec.engine) != engine || Keyword(rec.keyword) != keyword)
        throw FetchError(FetchError::Kind::Malformed, engine.name(), keyword.text(),
                         "fixture " + file.string() + " holds a different engine or keyword");
    return rec;
}

RedirectMap load_redirect_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open redirect map " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("redirect map " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("redirect map must be a JSON object");
    RedirectMap out;
    for (const auto& item : j.items()) {
        if (!item.value().is_string())
            throw std::invalid_argument("redirect target for '" + item.key() + "' is not a string");
        out.emplace(item.key(), item.value().get<std::string>());
    }
    return out;
}

std::string RedirectingAdapter::resolve(const std::string& url) const {
    std::set<std::string> visited{url};
    std::string current = url;
    for (auto it = redirects_.find(current); it != redirects_.end(); it = redirects_.find(current)) {
        if (!visited.insert(it->second).second) break;
        current = it->second;
    }
    return current;
}

RawSnapshotRecord RedirectingAdapter::fetch(const EngineId& engine, const Keyword& keyword) {
    RawSnapshotRecord rec = inner_->fetch(engine, keyword);
    for (auto& url : rec.results) url = resolve(url);
    return rec;
}

RawSnapshotRecord snapshot_via_adapter(FetchAdapter& adapter, const EngineId& engine,
                                       const Keyword& keyword) {
    try {
        return adapter.fetch(engine, keyword);
    } catch (const FetchError&) {
        throw;
    } catch (const std::exception& e) {
        throw FetchError(FetchError::Kind::Other, engine.name(), keyword.text(), e.what());
    }
}

void JsonlAppender::append(const RawSnapshotRecord& record) {
    const std::string line = to_json_line(record) + "\n";
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot append to " + path_.string());
    out << line;
}

}  // namespace serank
