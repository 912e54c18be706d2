#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "serank/scoring.hpp"

namespace serank {
namespace {

constexpr double kDefaultSumSquares = 0.172842;  // sum of q_p^2 over the ten CTR values
constexpr double kDefaultSum = 0.890;

Corpus corpus_of(const std::vector<std::pair<std::string, std::vector<std::string>>>& rankings,
                 const CtrProfile& ctr = CtrProfile::standard(), const std::string& keyword = "k") {
    std::vector<EngineId> engines;
    std::map<SnapshotKey, RankingSnapshot> snaps;
    const Keyword k(keyword);
    for (const auto& [name, urls] : rankings) {
        EngineId e(name);
        engines.push_back(e);
        RankingSnapshot s{e, k, {}, std::nullopt};
        for (const auto& u : urls) s.results.emplace_back(u);
        snaps.emplace(SnapshotKey{e, k}, std::move(s));
    }
    return Corpus(std::move(engines), {k}, std::move(snaps), ctr);
}

std::vector<std::string> ten_pages(const std::string& prefix = "https://p.com/") {
    std::vector<std::string> out;
    for (int i = 1; i <= 10; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

// Test-side oracle: walks the snapshots page by page instead of position by
// position.
double brute_force_page_score(const Corpus& c, const Keyword& k, const PageId& page) {
    double total = 0.0;
    for (const auto& e : c.engines()) {
        const auto* snap = c.find(e, k);
        std::size_t pos = c.ctr().display_length() + 1;
        for (std::size_t p = 0; p < snap->results.size(); ++p)
            if (snap->results[p] == page) pos = p + 1;
        total += c.ctr().weight(pos);
    }
    return total / static_cast<double>(c.engine_count());
}

// Exhaustive search over ordered selections of `slots` distinct pages.
double best_arrangement(const std::vector<double>& scores, const CtrProfile& ctr, std::size_t slots) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    double best = 0.0;
    const std::size_t take = std::min(slots, scores.size());
    std::sort(idx.begin(), idx.end());
    do {
        double s = 0.0;
        for (std::size_t p = 0; p < take; ++p) s += ctr.weight(p + 1) * scores[idx[p]];
        best = std::max(best, s);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}

TEST(PageScoresTest, SingleEngineTopPage) {
    auto c = corpus_of({{"g", {"https://x.com/"}}});
    const auto r = page_scores(c, Keyword("k"));
    EXPECT_DOUBLE_EQ(r.at(PageId("https://x.com/")), 0.364);
}

TEST(PageScoresTest, AverageOverAllEngines) {
    auto c = corpus_of({{"e1", {"https://x.com/", "https://a.com/"}},
                        {"e2", {"https://a.com/", "https://b.com/", "https://x.com/"}},
                        {"e3", {"https://b.com/"}}});
    const Keyword k("k");
    const auto r = page_scores(c, k);
    const PageId x("https://x.com/");
    EXPECT_NEAR(r.at(x), 0.153, 1e-15);
    EXPECT_DOUBLE_EQ(r.at(x), brute_force_page_score(c, k, x));
    for (const auto& [page, score] : r) EXPECT_DOUBLE_EQ(score, brute_force_page_score(c, k, page));
    EXPECT_FALSE(r.contains(PageId("https://never.com/")));
    EXPECT_EQ(r.size(), 3u);
}

TEST(PageScoresTest, UnknownKeyword) {
    auto c = corpus_of({{"g", {"https://x.com/"}}});
    EXPECT_THROW(page_scores(c, Keyword("other")), UnknownKeyword);
}

TEST(EngineScoreTest, SingleEngineIsSumOfSquares) {
    auto c = corpus_of({{"g", ten_pages()}});
    const Keyword k("k");
    EXPECT_NEAR(engine_score(c, EngineId("g"), k, page_scores(c, k)), kDefaultSumSquares, 1e-15);
}

TEST(EngineScoreTest, IdenticalEnginesShareTheCeiling) {
    auto c = corpus_of({{"g", ten_pages()}, {"b", ten_pages()}});
    const Keyword k("k");
    const auto r = page_scores(c, k);
    EXPECT_NEAR(engine_score(c, EngineId("g"), k, r), kDefaultSumSquares, 1e-15);
    EXPECT_NEAR(engine_score(c, EngineId("b"), k, r), kDefaultSumSquares, 1e-15);
}

TEST(EngineScoreTest, EmptyResultsScoreZero) {
    auto c = corpus_of({{"g", ten_pages()}, {"empty", {}}});
    const Keyword k("k");
    EXPECT_EQ(engine_score(c, EngineId("empty"), k, page_scores(c, k)), 0.0);
    EXPECT_EQ(engine_score_all_pages(c, EngineId("empty"), k, page_scores(c, k)), 0.0);
}

TEST(EngineScoreTest, Errors) {
    auto c = corpus_of({{"g", ten_pages()}});
    const Keyword k("k");
    const auto r = page_scores(c, k);
    EXPECT_THROW(engine_score(c, EngineId("nope"), k, r), UnknownEngine);
    EXPECT_THROW(engine_score(c, EngineId("g"), Keyword("nope"), r), UnknownKeyword);
}

TEST(EngineMeanScoreTest, Mean) {
    const std::vector<double> v{0.1, 0.2};
    EXPECT_NEAR(engine_mean_score(v), 0.15, 1e-15);
    const std::vector<double> same(7, 0.042);
    EXPECT_DOUBLE_EQ(engine_mean_score(same), 0.042);
    EXPECT_THROW(engine_mean_score(std::vector<double>{}), EmptyKeywordSet);
}

TEST(ConsensusRankingTest, SortsDescending) {
    PageScores s{{PageId("X"), 0.3}, {PageId("Y"), 0.1}, {PageId("Z"), 0.2}};
    EXPECT_EQ(consensus_ranking(s, CtrProfile::standard()),
              (std::vector<PageId>{PageId("X"), PageId("Z"), PageId("Y")}));
    EXPECT_TRUE(consensus_ranking({}, CtrProfile::standard()).empty());
}

TEST(ConsensusRankingTest, TiesLexicographicAndZerosExcluded) {
    PageScores s{{PageId("b"), 0.2}, {PageId("a"), 0.2}, {PageId("c"), 0.0}, {PageId("d"), 0.5}};
    EXPECT_EQ(consensus_ranking(s, CtrProfile::standard()),
              (std::vector<PageId>{PageId("d"), PageId("a"), PageId("b")}));
    auto reverse = [](const PageId& x, const PageId& y) { return x.url() > y.url(); };
    EXPECT_EQ(consensus_ranking(s, CtrProfile::standard(), reverse),
              (std::vector<PageId>{PageId("d"), PageId("b"), PageId("a")}));
}

TEST(ConsensusRankingTest, TruncatedToDisplayLength) {
    PageScores s;
    for (int i = 0; i < 15; ++i) s.emplace(PageId("p" + std::to_string(i)), 0.01 * (i + 1));
    const auto out = consensus_ranking(s, CtrProfile::standard());
    ASSERT_EQ(out.size(), 10u);
    EXPECT_EQ(out.front(), PageId("p14"));
    EXPECT_EQ(out.back(), PageId("p5"));
}

TEST(ConsensusScoreTest, OneTerm) {
    PageScores s{{PageId("X"), 0.3}};
    EXPECT_NEAR(consensus_score(consensus_ranking(s, CtrProfile::standard()), s, CtrProfile::standard()),
                0.1092, 1e-15);
}

TEST(ConsensusScoreTest, MatchesExhaustiveSearch) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const CtrProfile ctr({0.4, 0.25, 0.1, 0.05});
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t pages = 1 + rng() % 6;
        PageScores s;
        std::vector<double> values;
        for (std::size_t i = 0; i < pages; ++i) {
            const double v = u(rng) < 0.2 ? values.empty() ? 0.1 : values.back() : u(rng);
            s.emplace(PageId("p" + std::to_string(i)), v);
            values.push_back(v);
        }
        const double got = consensus_score(consensus_ranking(s, ctr), s, ctr);
        EXPECT_NEAR(got, best_arrangement(values, ctr, 4), 1e-12);
    }
}

TEST(ComputeScoresTest, DualFormulationAndDominance) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 6;
        std::vector<std::pair<std::string, std::vector<std::string>>> rankings;
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<std::string> pool;
            for (int i = 0; i < 15; ++i) pool.push_back("https://s.com/" + std::to_string(i));
            std::shuffle(pool.begin(), pool.end(), rng);
            pool.resize(rng() % 11);
            rankings.emplace_back("e" + std::to_string(j), pool);
        }
        const auto c = corpus_of(rankings);
        const Keyword k("k");
        const auto r = page_scores(c, k);
        const auto table = compute_scores(c);
        for (std::size_t j = 0; j < n; ++j) {
            const double displayed = engine_score(c, c.engines()[j], k, r);
            EXPECT_NEAR(displayed, engine_score_all_pages(c, c.engines()[j], k, r), 1e-15);
            EXPECT_EQ(displayed, table.engine_scores[j][0]);
            EXPECT_GE(table.consensus_scores[0], displayed - 1e-12);
            EXPECT_LE(displayed, kDefaultSumSquares + 1e-12);
        }
        EXPECT_LE(table.consensus_scores[0], kDefaultSumSquares + 1e-12);
    }
}

TEST(ComputeScoresTest, MassConservation) {
    auto c = corpus_of({{"a", ten_pages("https://a.com/")},
                        {"b", ten_pages("https://b.com/")},
                        {"c", ten_pages("https://a.com/")}});
    double total = 0.0;
    for (const auto& [page, r] : page_scores(c, Keyword("k"))) total += r;
    EXPECT_NEAR(total, kDefaultSum, 1e-12);
}

TEST(ComputeScoresTest, CtrScalingSquaresScores) {
    auto c = corpus_of({{"a", {"https://x/1", "https://x/2", "https://x/3"}},
                        {"b", {"https://x/2", "https://x/4"}},
                        {"c", {"https://x/3", "https://x/1", "https://x/5"}}});
    const double lambda = 2.5;
    const auto base = compute_scores(c);
    const auto scaled = compute_scores(c.with_ctr(c.ctr().scaled(lambda)));
    for (std::size_t j = 0; j < 3; ++j)
        EXPECT_NEAR(scaled.engine_scores[j][0], lambda * lambda * base.engine_scores[j][0], 1e-14);
    EXPECT_NEAR(scaled.consensus_scores[0], lambda * lambda * base.consensus_scores[0], 1e-14);
    EXPECT_EQ(scaled.consensus, base.consensus);
    for (const auto& [page, r] : base.page_scores[0])
        EXPECT_NEAR(scaled.page_scores[0].at(page), lambda * r, 1e-15);
}

TEST(ComputeScoresTest, EngineRelabelingInvariant) {
    auto c1 = corpus_of({{"a", {"https://x/1", "https://x/2"}}, {"b", {"https://x/2", "https://x/3"}}});
    auto c2 = corpus_of({{"b", {"https://x/2", "https://x/3"}}, {"a", {"https://x/1", "https://x/2"}}});
    const auto t1 = compute_scores(c1);
    const auto t2 = compute_scores(c2);
    EXPECT_EQ(t1.consensus, t2.consensus);
    EXPECT_DOUBLE_EQ(t1.engine_scores[0][0], t2.engine_scores[1][0]);
    EXPECT_DOUBLE_EQ(t1.engine_scores[1][0], t2.engine_scores[0][0]);
    EXPECT_DOUBLE_EQ(t1.consensus_scores[0], t2.consensus_scores[0]);
}

}  // namespace
}  // namespace serank
