#ifndef SERANK_INGEST_HPP
#define SERANK_INGEST_HPP

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "serank/canonicalize.hpp"
#include "serank/core_model.hpp"

namespace serank {

inline constexpr std::size_t kMaxRawResults = 100;

/// One line of a corpus file, before canonicalization.
struct RawSnapshotRecord {
    std::string engine;
    std::string keyword;
    std::optional<std::string> captured_at;
    std::vector<std::string> results;

    friend bool operator==(const RawSnapshotRecord&, const RawSnapshotRecord&) = default;
};

/// Compact JSON with the fixed field order engine, keyword, captured_at, results.
std::string to_json_line(const RawSnapshotRecord& record);

/// Throws std::invalid_argument when the text is not a well-formed record
/// (missing/mistyped fields, empty engine or keyword, more than
/// kMaxRawResults results).
RawSnapshotRecord parse_record(std::string_view json_text);

enum class MissingPolicy { Fail, DropKeyword };

std::string_view to_string(MissingPolicy policy) noexcept;
MissingPolicy parse_missing_policy(std::string_view text);

struct IngestOptions {
    CanonicalizationPolicy canonicalization;
    GroupingMode grouping = GroupingMode::KeepAll;
    MissingPolicy missing = MissingPolicy::Fail;
    CtrProfile ctr = CtrProfile::standard();
};

struct SkippedUrl {
    std::size_t line = 0;
    std::string url;
    std::string reason;
};

struct IngestReport {
    std::size_t records = 0;
    std::vector<SkippedUrl> skipped_urls;
    std::vector<std::string> dropped_keywords;
    std::vector<std::string> warnings;
};

struct LoadResult {
    Corpus corpus;
    IngestReport report;
};

class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedRecord : public IngestError {
public:
    MalformedRecord(std::size_t line, const std::string& why)
        : IngestError("malformed record on line " + std::to_string(line) + ": " + why), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class MissingSnapshot : public IngestError {
public:
    MissingSnapshot(const std::string& engine, const std::string& keyword)
        : IngestError("missing snapshot for (" + engine + ", " + keyword + ")") {}
};

class EmptyCorpus : public IngestError {
public:
    EmptyCorpus() : IngestError("corpus contains no usable keyword") {}
};

/// Builds a corpus from raw records. Engines and keywords keep the order of
/// their first appearance; a repeated (engine, keyword) record replaces the
/// earlier one. Results are canonicalized, de-duplicated keeping the earliest
/// position, grouped, and cut to the CTR display length.
LoadResult build_corpus(const std::vector<RawSnapshotRecord>& records, const IngestOptions& options,
                        const std::vector<std::size_t>& line_numbers = {});

LoadResult load_corpus(std::istream& in, const IngestOptions& options);
LoadResult load_corpus(const std::filesystem::path& path, const IngestOptions& options);

/// Canonical JSONL: engines x keywords in corpus order.
void write_corpus(const Corpus& corpus, std::ostream& out);

/// CSV with header "position,weight", positions 1..a in order.
CtrProfile load_ctr_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Fetch adapters

class FetchError : public std::runtime_error {
public:
    enum class Kind { UnknownEngine, UnknownKeyword, Io, Malformed, Other };

    FetchError(Kind kind, std::string engine, std::string keyword, const std::string& detail)
        : std::runtime_error(std::string(kind_name(kind)) + " (" + engine + ", " + keyword +
                             "): " + detail),
          kind_(kind),
          engine_(std::move(engine)),
          keyword_(std::move(keyword)) {}

    Kind kind() const noexcept { return kind_; }
    const std::string& engine() const noexcept { return engine_; }
    const std::string& keyword() const noexcept { return keyword_; }

    static std::string_view kind_name(Kind kind) noexcept;

private:
    Kind kind_;
    std::string engine_;
    std::string keyword_;
};

/// Source of raw snapshots for one (engine, keyword) pair.
class FetchAdapter {
public:
    virtual ~FetchAdapter() = default;
    virtual RawSnapshotRecord fetch(const EngineId& engine, const Keyword& keyword) = 0;
};

/// Percent-encodes everything outside [A-Za-z0-9-._~].
std::string url_encode_component(std::string_view text);

/// Serves stored records from <root>/<engine>/<url-encoded-keyword>.json.
class ReplayAdapter final : public FetchAdapter {
public:
    explicit ReplayAdapter(std::filesystem::path root) : root_(std::move(root)) {}

    RawSnapshotRecord fetch(const EngineId& engine, const Keyword& keyword) override;

    std::filesystem::path path_for(const EngineId& engine, const Keyword& keyword) const;

private:
    std::filesystem::path root_;
};

using RedirectMap = std::map<std::string, std::string>;

/// JSON object of string -> string.
RedirectMap load_redirect_map(const std::filesystem::path& path);

/// Rewrites result URLs through a recorded redirect map, following chains.
class RedirectingAdapter final : public FetchAdapter {
public:
    RedirectingAdapter(std::shared_ptr<FetchAdapter> inner, RedirectMap redirects)
        : inner_(std::move(inner)), redirects_(std::move(redirects)) {}

    RawSnapshotRecord fetch(const EngineId& engine, const Keyword& keyword) override;

    /// Final target of url; cycles stop at the first repeated URL.
    std::string resolve(const std::string& url) const;

private:
    std::shared_ptr<FetchAdapter> inner_;
    RedirectMap redirects_;
};

/// Calls the adapter; non-FetchError failures are wrapped with the
/// (engine, keyword) context.
RawSnapshotRecord snapshot_via_adapter(FetchAdapter& adapter, const EngineId& engine,
                                       const Keyword& keyword);

/// Appends records to a JSONL file. Safe to share between threads.
class JsonlAppender {
public:
    explicit JsonlAppender(std::filesystem::path path) : path_(std::move(path)) {}

    void append(const RawSnapshotRecord& record);

private:
    std::filesystem::path path_;
    std::mutex mutex_;
};

}  // namespace serank

#endif  // SERANK_INGEST_HPP
