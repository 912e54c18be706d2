#ifndef SERANK_CORE_MODEL_HPP
#define SERANK_CORE_MODEL_HPP

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace serank {

/// Search engine identifier. Stored lower-case; must be non-empty.
class EngineId {
public:
    explicit EngineId(std::string_view name);

    const std::string& name() const noexcept { return name_; }

    friend bool operator==(const EngineId&, const EngineId&) = default;
    friend auto operator<=>(const EngineId&, const EngineId&) = default;

private:
    std::string name_;
};

/// Query text. Whitespace-trimmed on construction; identity is the
/// lower-cased text, while the original casing is kept for display.
class Keyword {
public:
    explicit Keyword(std::string_view text);

    const std::string& text() const noexcept { return text_; }
    const std::string& key() const noexcept { return key_; }

    friend bool operator==(const Keyword& a, const Keyword& b) noexcept { return a.key_ == b.key_; }
    friend std::strong_ordering operator<=>(const Keyword& a, const Keyword& b) noexcept {
        return a.key_ <=> b.key_;
    }

private:
    std::string text_;
    std::string key_;
};

/// Canonical identity of a page. Equality is exact string equality of the
/// canonical URL; no normalization happens here (see canonicalize.hpp).
class PageId {
public:
    PageId() = default;
    explicit PageId(std::string canonical_url) : url_(std::move(canonical_url)) {}

    const std::string& url() const noexcept { return url_; }

    friend bool operator==(const PageId&, const PageId&) = default;
    friend auto operator<=>(const PageId&, const PageId&) = default;

private:
    std::string url_;
};

/// Position-dependent click-through-rate weights q_1..q_a.
/// Positions beyond a (and position 0) have weight exactly 0.
class CtrProfile {
public:
    /// Throws std::invalid_argument on an empty list or a negative/non-finite weight.
    explicit CtrProfile(std::vector<double> weights);

    /// CTR values measured for the first results page, a = 10.
    static CtrProfile standard();

    /// 1-based position.
    double weight(std::size_t position) const noexcept {
        return position >= 1 && position <= weights_.size() ? weights_[position - 1] : 0.0;
    }
    std::size_t display_length() const noexcept { return weights_.size(); }
    const std::vector<double>& weights() const noexcept { return weights_; }

    /// Non-fatal remarks, e.g. weights that increase with position.
    std::vector<std::string> warnings() const;

    CtrProfile scaled(double factor) const;

    friend bool operator==(const CtrProfile&, const CtrProfile&) = default;

private:
    std::vector<double> weights_;
};

struct RankingSnapshot {
    EngineId engine;
    Keyword keyword;
    std::vector<PageId> results;
    std::optional<std::string> captured_at;

    friend bool operator==(const RankingSnapshot&, const RankingSnapshot&) = default;
};

using SnapshotKey = std::pair<EngineId, Keyword>;

/// Engines x keywords -> snapshots, plus the CTR profile used to score them.
/// Immutable once built; structure is checked by validate_corpus, not here.
class Corpus {
public:
    Corpus(std::vector<EngineId> engines, std::vector<Keyword> keywords,
           std::map<SnapshotKey, RankingSnapshot> snapshots, CtrProfile ctr);

    const std::vector<EngineId>& engines() const noexcept { return engines_; }
    const std::vector<Keyword>& keywords() const noexcept { return keywords_; }
    const std::map<SnapshotKey, RankingSnapshot>& snapshots() const noexcept { return snapshots_; }
    const CtrProfile& ctr() const noexcept { return ctr_; }

    std::size_t engine_count() const noexcept { return engines_.size(); }
    std::size_t keyword_count() const noexcept { return keywords_.size(); }

    bool has_engine(const EngineId& engine) const;
    bool has_keyword(const Keyword& keyword) const;

    /// nullptr when the pair has no snapshot.
    const RankingSnapshot* find(const EngineId& engine, const Keyword& keyword) const;

    /// Same data, different CTR profile.
    Corpus with_ctr(CtrProfile ctr) const;

    friend bool operator==(const Corpus&, const Corpus&) = default;

private:
    std::vector<EngineId> engines_;
    std::vector<Keyword> keywords_;
    std::map<SnapshotKey, RankingSnapshot> snapshots_;
    CtrProfile ctr_;
};

enum class ViolationKind {
    NoEngines,
    NoKeywords,
    DuplicateEngine,
    DuplicateKeyword,
    MissingSnapshot,
    UnexpectedSnapshot,
    DuplicatePage,
    TooManyResults,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
    ViolationKind kind;
    std::optional<std::string> engine;
    std::optional<std::string> keyword;
    std::string detail;

    friend bool operator==(const Violation&, const Violation&) = default;
};

std::string describe(const Violation& violation);

/// Empty iff the corpus satisfies every structural invariant. Ordering of
/// the result is deterministic: global checks, then engines x keywords in
/// corpus order.
std::vector<Violation> validate_corpus(const Corpus& corpus);

/// Engines, keywords or pages the caller asked about that the corpus lacks.
class UnknownEngine : public std::invalid_argument {
public:
    explicit UnknownEngine(const EngineId& engine)
        : std::invalid_argument("unknown engine: " + engine.name()) {}
};

class UnknownKeyword : public std::invalid_argument {
public:
    explicit UnknownKeyword(const Keyword& keyword)
        : std::invalid_argument("unknown keyword: " + keyword.text()) {}
};

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);

}  // namespace serank

#endif  // SERANK_CORE_MODEL_HPP
