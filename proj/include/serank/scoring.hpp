#ifndef SERANK_SCORING_HPP
#define SERANK_SCORING_HPP

#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "serank/core_model.hpp"

namespace serank {

/// Page -> average visibility over all engines for one keyword.
using PageScores = std::map<PageId, double>;

/// Strict weak ordering used to break ties between equally scored pages.
using TieBreak = std::function<bool(const PageId&, const PageId&)>;

inline bool lexicographic_tie_break(const PageId& a, const PageId& b) { return a.url() < b.url(); }

class EmptyKeywordSet : public std::invalid_argument {
public:
    EmptyKeywordSet() : std::invalid_argument("cannot average over an empty keyword set") {}
};

/// R_i = (1/n) * sum over engines of the CTR weight of page i's position,
/// where n counts every engine in the corpus. Pages no engine displays are
/// absent. Throws UnknownKeyword.
PageScores page_scores(const Corpus& corpus, const Keyword& keyword);

/// Engine score summed over displayed positions: sum_p q_p * R(page at p).
/// Throws UnknownEngine / UnknownKeyword.
double engine_score(const Corpus& corpus, const EngineId& engine, const Keyword& keyword,
                    const PageScores& scores);

/// Same quantity summed over every scored page: sum_i q_{pos(i)} * R_i, with
/// q = 0 for pages the engine does not display.
double engine_score_all_pages(const Corpus& corpus, const EngineId& engine,
                              const Keyword& keyword, const PageScores& scores);

/// Arithmetic mean; throws EmptyKeywordSet on an empty list.
double engine_mean_score(std::span<const double> per_keyword);

/// Pages by descending score, at most ctr.display_length() of them. Pages
/// with score 0 are never included.
std::vector<PageId> consensus_ranking(const PageScores& scores, const CtrProfile& ctr,
                                      const TieBreak& tie_break = lexicographic_tie_break);

/// sum_p q_p * R(list[p]).
double consensus_score(std::span<const PageId> consensus, const PageScores& scores,
                       const CtrProfile& ctr);

/// Everything the reports need, in corpus order.
struct ScoreTable {
    std::vector<EngineId> engines;
    std::vector<Keyword> keywords;
    std::vector<PageScores> page_scores;                 // [keyword]
    std::vector<std::vector<double>> engine_scores;      // [engine][keyword]
    std::vector<std::vector<PageId>> consensus;          // [keyword]
    std::vector<double> consensus_scores;                // [keyword]
    std::vector<double> engine_means;                    // [engine]
    double consensus_mean = 0.0;
};

ScoreTable compute_scores(const Corpus& corpus,
                          const TieBreak& tie_break = lexicographic_tie_break);

}  // namespace serank

#endif  // SERANK_SCORING_HPP
