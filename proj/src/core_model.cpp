#include "serank/core_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace serank {

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

EngineId::EngineId(std::string_view name) : name_(to_lower_ascii(trim(name))) {
    if (name_.empty()) throw std::invalid_argument("engine id must be non-empty");
}

Keyword::Keyword(std::string_view text) : text_(trim(text)), key_(to_lower_ascii(text_)) {
    if (text_.empty()) throw std::invalid_argument("keyword must be non-empty");
}

CtrProfile::CtrProfile(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("CTR profile needs at least one position");
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!std::isfinite(weights_[i]) || weights_[i] < 0.0)
            throw std::invalid_argument("CTR weight at position " + std::to_string(i + 1) +
                                        " must be a finite non-negative number");
    }
}

CtrProfile CtrProfile::standard() {
    return CtrProfile({0.364, 0.125, 0.095, 0.079, 0.061, 0.041, 0.038, 0.035, 0.03, 0.022});
}

std::vector<std::string> CtrProfile::warnings() const {
    std::vector<std::string> out;
    for (std::size_t p = 1; p < weights_.size(); ++p) {
        if (weights_[p] > weights_[p - 1]) {
            out.push_back("CTR weight increases from position " + std::to_string(p) + " to " +
                          std::to_string(p + 1));
        }
    }
    return out;
}

CtrProfile CtrProfile::scaled(double factor) const {
    std::vector<double> w = weights_;
    for (double& x : w) x *= factor;
    return CtrProfile(std::move(w));
}

Corpus::Corpus(std::vector<EngineId> engines, std::vector<Keyword> keywords,
               std::map<SnapshotKey, RankingSnapshot> snapshots, CtrProfile ctr)
    : engines_(std::move(engines)),
      keywords_(std::move(keywords)),
      snapshots_(std::move(snapshots)),
      ctr_(std::move(ctr)) {}

bool Corpus::has_engine(const EngineId& engine) const {
    return std::find(engines_.begin(), engines_.end(), engine) != engines_.end();
}

bool Corpus::has_keyword(const Keyword& keyword) const {
    return std::find(keywords_.begin(), keywords_.end(), keyword) != keywords_.end();
}

const RankingSnapshot* Corpus::find(const EngineId& engine, const Keyword& keyword) const {
    auto it = snapshots_.find({engine, keyword});
    return it == snapshots_.end() ? nullptr : &it->second;
}

Corpus Corpus::with_ctr(CtrProfile ctr) const {
    return Corpus(engines_, keywords_, snapshots_, std::move(ctr));
}

std::string_view to_string(ViolationKind kind) noexcept {
    switch (kind) {
        case ViolationKind::NoEngines: return "NoEngines";
        case ViolationKind::NoKeywords: return "NoKeywords";
        case ViolationKind::DuplicateEngine: return "DuplicateEngine";
        case ViolationKind::DuplicateKeyword: return "DuplicateKeyword";
        case ViolationKind::MissingSnapshot: return "MissingSnapshot";
        case ViolationKind::UnexpectedSnapshot: return "UnexpectedSnapshot";
        case ViolationKind::DuplicatePage: return "DuplicatePage";
        case ViolationKind::TooManyResults: return "TooManyResults";
    }
    return "Unknown";
}

std::string describe(const Violation& v) {
    std::string out(to_string(v.kind));
    if (v.engine || v.keyword) {
        out += "(";
        out += v.engine.value_or("-");
        out += ", ";
        out += v.keyword.value_or("-");
        out += ")";
    }
    if (!v.detail.empty()) out += ": " + v.detail;
    return out;
}

std::vector<Violation> validate_corpus(const Corpus& corpus) {
    std::vector<Violation> out;
    const auto& engines = corpus.engines();
    const auto& keywords = corpus.keywords();

    if (engines.empty()) out.push_back({ViolationKind::NoEngines, {}, {}, "corpus has no engines"});
    if (keywords.empty()) out.push_back({ViolationKind::NoKeywords, {}, {}, "corpus has no keywords"});

    std::set<EngineId> seen_engines;
    for (const auto& e : engines) {
        if (!seen_engines.insert(e).second)
            out.push_back({ViolationKind::DuplicateEngine, e.name(), {}, "engine listed twice"});
    }
    std::set<Keyword> seen_keywords;
    for (const auto& k : keywords) {
        if (!seen_keywords.insert(k).second)
            out.push_back({ViolationKind::DuplicateKeyword, {}, k.text(), "keyword listed twice"});
    }

    for (const auto& [key, snap] : corpus.snapshots()) {
        if (!seen_engines.contains(key.first) || !seen_keywords.contains(key.second)) {
            out.push_back({ViolationKind::UnexpectedSnapshot, key.first.name(), key.second.text(),
                           "snapshot for an engine or keyword outside the corpus"});
        }
    }

    const std::size_t a = corpus.ctr().display_length();
    for (const auto& e : engines) {
        for (const auto& k : keywords) {
            const RankingSnapshot* snap = corpus.find(e, k);
            if (snap == nullptr) {
                out.push_back({ViolationKind::MissingSnapshot, e.name(), k.text(), ""});
                continue;
            }
            std::map<PageId, std::size_t> first_pos;
            for (std::size_t p = 0; p < snap->results.size(); ++p) {
                auto [it, inserted] = first_pos.emplace(snap->results[p], p + 1);
                if (!inserted) {
                    out.push_back({ViolationKind::DuplicatePage, e.name(), k.text(),
                                   snap->results[p].url() + " at positions " +
                                       std::to_string(it->second) + " and " + std::to_string(p + 1)});
                }
            }
            if (snap->results.size() > a) {
                out.push_back({ViolationKind::TooManyResults, e.name(), k.text(),
                               std::to_string(snap->results.size()) + " results, display length " +
                                   std::to_string(a)});
            }
        }
    }
    return out;
}

}  // namespace serank
