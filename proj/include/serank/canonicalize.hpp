#ifndef SERANK_CANONICALIZE_HPP
#define SERANK_CANONICALIZE_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "serank/core_model.hpp"

namespace serank {

/// Syntactic rules used to decide when two result URLs name the same page.
/// Every rule can be switched off independently.
struct CanonicalizationPolicy {
    bool lowercase_host = true;
    bool lowercase_path = true;
    bool strip_fragment = true;
    bool strip_tracking_params = true;
    bool strip_trailing_slash = true;   // never applied to the root path "/"
    bool collapse_scheme = true;        // http and https map to https
    bool strip_default_port = true;
    bool sort_query_params = true;
    bool strip_www = true;
    bool strip_page_extensions = true;  // "/FunFacts.aspx" and "/FunFacts" coincide

    /// Query keys removed when strip_tracking_params is set. Glob patterns
    /// ('*' and '?') matched case-insensitively against the key.
    std::vector<std::string> tracking_params = {"utm_*", "gclid", "fbclid", "ref", "nav"};

    /// Server-side page suffixes dropped from the last path segment.
    std::vector<std::string> page_extensions = {".aspx", ".asp", ".php", ".html",
                                                ".htm",  ".jsp", ".shtml"};

    friend bool operator==(const CanonicalizationPolicy&, const CanonicalizationPolicy&) = default;
};

class MalformedUrl : public std::invalid_argument {
public:
    MalformedUrl(std::string url, const std::string& reason)
        : std::invalid_argument("malformed URL '" + url + "': " + reason), url_(std::move(url)) {}

    const std::string& url() const noexcept { return url_; }

private:
    std::string url_;
};

/// Canonical string form of an absolute URL. Throws MalformedUrl when the
/// input has no scheme, no host, or an invalid port.
std::string canonicalize_url(std::string_view raw, const CanonicalizationPolicy& policy = {});

inline PageId canonical_url(std::string_view raw, const CanonicalizationPolicy& policy = {}) {
    return PageId(canonicalize_url(raw, policy));
}

/// Case-insensitive glob match supporting '*' and '?'.
bool glob_match(std::string_view pattern, std::string_view text);

enum class GroupingMode { KeepAll, CollapseToHost };

std::string_view to_string(GroupingMode mode) noexcept;
GroupingMode parse_grouping_mode(std::string_view text);

/// "scheme://host[:port]" prefix of a canonical URL.
std::string site_of(const PageId& page);

/// In collapse mode only the earliest-ranked page of each site survives.
/// Surviving pages keep their relative order.
std::vector<PageId> group_subpages(std::span<const PageId> results, GroupingMode mode);

}  // namespace serank

#endif  // SERANK_CANONICALIZE_HPP
