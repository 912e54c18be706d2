#include "serank/scoring.hpp"

#include <algorithm>
#include <numeric>

namespace serank {
namespace {

const RankingSnapshot& snapshot_or_throw(const Corpus& corpus, const EngineId& engine,
                                         const Keyword& keyword) {
    if (!corpus.has_engine(engine)) throw UnknownEngine(engine);
    if (!corpus.has_keyword(keyword)) throw UnknownKeyword(keyword);
    const RankingSnapshot* snap = corpus.find(engine, keyword);
    if (snap == nullptr) {
        throw std::invalid_argument("no snapshot for (" + engine.name() + ", " + keyword.text() +
                                    ")");
    }
    return *snap;
}

double score_of(const PageScores& scores, const PageId& page) {
    auto it = scores.find(page);
    return it == scores.end() ? 0.0 : it->second;
}

}  // namespace

PageScores page_scores(const Corpus& corpus, const Keyword& keyword) {
    if (!corpus.has_keyword(keyword)) throw UnknownKeyword(keyword);
    const auto& ctr = corpus.ctr();
    const double n = static_cast<double>(corpus.engine_count());

    // Visibility sums are accumulated in engine order so the result does not
    // depend on map iteration.
    PageScores sums;
    for (const auto& engine : corpus.engines()) {
        const RankingSnapshot* snap = corpus.find(engine, keyword);
        if (snap == nullptr) continue;
        for (std::size_t p = 0; p < snap->results.size(); ++p) {
            sums[snap->results[p]] += ctr.weight(p + 1);
        }
    }
    for (auto& [page, total] : sums) total /= n;
    return sums;
}

double engine_score(const Corpus& corpus, const EngineId& engine, const Keyword& keyword,
                    const PageScores& scores) {
    const RankingSnapshot& snap = snapshot_or_throw(corpus, engine, keyword);
    const auto& ctr = corpus.ctr();
    double total = 0.0;
    for (std::size_t p = 0; p < snap.results.size(); ++p) {
        total += ctr.weight(p + 1) * score_of(scores, snap.results[p]);
    }
    return total;
}

double engine_score_all_pages(const Corpus& corpus, const EngineId& engine,
                              const Keyword& keyword, const PageScores& scores) {
    const RankingSnapshot& snap = snapshot_or_throw(corpus, engine, keyword);
    const auto& ctr = corpus.ctr();
    const std::size_t not_shown = ctr.display_length() + 1;

    std::map<PageId, std::size_t> position;
    for (std::size_t p = 0; p < snap.results.size(); ++p) position.emplace(snap.results[p], p + 1);

    double total = 0.0;
    for (const auto& [page, r] : scores) {
        auto it = position.find(page);
        const std::size_t pos = it == position.end() ? not_shown : it->second;
        total += ctr.weight(pos) * r;
    }
    return total;
}

double engine_mean_score(std::span<const double> per_keyword) {
    if (per_keyword.empty()) throw EmptyKeywordSet();
    return std::accumulate(per_keyword.begin(), per_keyword.end(), 0.0) /
           static_cast<double>(per_keyword.size());
}

std::vector<PageId> consensus_ranking(const PageScores& scores, const CtrProfile& ctr,
                                      const TieBreak& tie_break) {
    std::vector<std::pair<PageId, double>> entries;
    entries.reserve(scores.size());
    for (const auto& [page, r] : scores) {
        if (r > 0.0) entries.emplace_back(page, r);
    }
    const std::size_t keep = std::min(entries.size(), ctr.display_length());
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(keep),
                      entries.end(), [&](const auto& a, const auto& b) {
                          if (a.second != b.second) return a.second > b.second;
                          return tie_break(a.first, b.first);
                      });
    std::vector<PageId> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.push_back(std::move(entries[i].first));
    return out;
}

double consensus_score(std::span<const PageId> consensus, const PageScores& scores,
                       const CtrProfile& ctr) {
    double total = 0.0;
    for (std::size_t p = 0; p < consensus.size(); ++p) {
        total += ctr.weight(p + 1) * score_of(scores, consensus[p]);
    }
    return total;
}

ScoreTable compute_scores(const Corpus& corpus, const TieBreak& tie_break) {
    ScoreTable table;
    table.engines = corpus.engines();
    table.keywords = corpus.keywords();
    const std::size_t n = table.engines.size();
    const std::size_t m = table.keywords.size();

    table.engine_scores.assign(n, std::vector<double>(m, 0.0));
    table.page_scores.reserve(m);
    table.consensus.reserve(m);
    table.consensus_scores.reserve(m);

    for (std::size_t k = 0; k < m; ++k) {
        const Keyword& keyword = table.keywords[k];
        PageScores scores = page_scores(corpus, keyword);
        for (std::size_t j = 0; j < n; ++j) {
            table.engine_scores[j][k] = engine_score(corpus, table.engines[j], keyword, scores);
        }
        auto ranking = consensus_ranking(scores, corpus.ctr(), tie_break);
        table.consensus_scores.push_back(consensus_score(ranking, scores, corpus.ctr()));
        table.consensus.push_back(std::move(ranking));
        table.page_scores.push_back(std::move(scores));
    }

    table.engine_means.reserve(n);
    for (const auto& row : table.engine_scores) table.engine_means.push_back(engine_mean_score(row));
    table.consensus_mean = engine_mean_score(table.consensus_scores);
    return table;
}

}  // namespace serank
