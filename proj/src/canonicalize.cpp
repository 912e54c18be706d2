#include "serank/canonicalize.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace serank {
namespace {

bool is_unreserved(unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~';
}

bool is_sub_delim(unsigned char c) {
    switch (c) {
        case '!': case '$': case '&': case '\'': case '(': case ')':
        case '*': case '+': case ',': case ';': case '=':
            return true;
        default:
            return false;
    }
}

int hex_value(unsigned char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

void append_escape(std::string& out, unsigned char c) {
    static constexpr char digits[] = "0123456789ABCDEF";
    out += '%';
    out += digits[c >> 4];
    out += digits[c & 0xF];
}

enum class Component { Path, Query, Fragment };

bool allowed_literal(unsigned char c, Component where) {
    if (is_unreserved(c) || is_sub_delim(c) || c == ':' || c == '@') return true;
    if (c == '/') return true;
    if (c == '?') return where != Component::Path;
    return false;
}

// Decodes escapes of unreserved characters, upper-cases the hex digits of
// the remaining escapes and escapes every byte that may not appear literally.
// A stray '%' becomes "%25".
std::string normalize_percent(std::string_view in, Component where) {
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        const auto c = static_cast<unsigned char>(in[i]);
        if (c == '%') {
            if (i + 2 < in.size() && hex_value(in[i + 1]) >= 0 && hex_value(in[i + 2]) >= 0) {
                const auto decoded =
                    static_cast<unsigned char>(hex_value(in[i + 1]) * 16 + hex_value(in[i + 2]));
                if (is_unreserved(decoded)) {
                    out += static_cast<char>(decoded);
                } else {
                    append_escape(out, decoded);
                }
                i += 2;
            } else {
                append_escape(out, '%');
            }
        } else if (allowed_literal(c, where)) {
            out += static_cast<char>(c);
        } else {
            append_escape(out, c);
        }
    }
    return out;
}

// Lower-cases everything except the hex digits of %XX escapes, which stay
// upper-case.
std::string lowercase_outside_escapes(std::string_view in) {
    std::string out(in);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] == '%' && i + 2 < out.size()) {
            i += 2;
            continue;
        }
        out[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])));
    }
    return out;
}

// Dot-segment removal for an absolute path.
std::string remove_dot_segments(std::string_view path) {
    std::vector<std::string_view> segments;
    bool trailing_slash = false;
    std::size_t pos = 1;  // skip the leading '/'
    while (pos <= path.size()) {
        std::size_t next = path.find('/', pos);
        if (next == std::string_view::npos) next = path.size();
        std::string_view seg = path.substr(pos, next - pos);
        const bool last = next == path.size();
        if (seg == ".") {
            trailing_slash = last;
        } else if (seg == "..") {
            if (!segments.empty()) segments.pop_back();
            trailing_slash = last;
        } else {
            segments.push_back(seg);
            trailing_slash = false;
        }
        pos = next + 1;
    }
    std::string out;
    for (auto seg : segments) {
        out += '/';
        out += seg;
    }
    if (trailing_slash || out.empty()) out += '/';
    return out;
}

bool iends_with(std::string_view text, std::string_view suffix) {
    if (suffix.size() > text.size()) return false;
    return std::equal(suffix.rbegin(), suffix.rend(), text.rbegin(), [](char a, char b) {
        return std::tolower(static_cast<unsigned char>(a)) ==
               std::tolower(static_cast<unsigned char>(b));
    });
}

void strip_page_extensions(std::string& path, const std::vector<std::string>& extensions) {
    bool changed = true;
    while (changed) {
        changed = false;
        const std::size_t seg_begin = path.rfind('/') + 1;
        std::string_view seg = std::string_view(path).substr(seg_begin);
        for (const auto& ext : extensions) {
            if (ext.empty() || seg.size() <= ext.size() || !iends_with(seg, ext)) continue;
            std::string_view rest = seg.substr(0, seg.size() - ext.size());
            if (rest == "." || rest == "..") continue;
            path.resize(seg_begin + rest.size());
            changed = true;
            break;
        }
    }
}

bool valid_host_char(unsigned char c) {
    if (c < 0x20 || c == 0x7F) return false;
    switch (c) {
        case ' ': case '<': case '>': case '"': case '{': case '}': case '|':
        case '\\': case '^': case '`': case '/': case '?': case '#': case '@':
        case '[': case ']': case ':':
            return false;
        default:
            return true;
    }
}

bool is_web_scheme(std::string_view scheme) { return scheme == "http" || scheme == "https"; }

std::string_view default_port(std::string_view scheme) {
    if (scheme == "http") return "80";
    if (scheme == "https") return "443";
    if (scheme == "ftp") return "21";
    return {};
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view text) {
    // Iterative wildcard matching with single-star backtracking.
    std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
    auto eq = [](char a, char b) {
        return std::tolower(static_cast<unsigned char>(a)) ==
               std::tolower(static_cast<unsigned char>(b));
    };
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || eq(pattern[p], text[t]))) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::string canonicalize_url(std::string_view raw_in, const CanonicalizationPolicy& policy) {
    const std::string raw = trim(raw_in);
    const std::size_t sep = raw.find("://");
    if (sep == std::string::npos || sep == 0) throw MalformedUrl(raw, "missing scheme");

    std::string scheme = to_lower_ascii(std::string_view(raw).substr(0, sep));
    if (!std::isalpha(static_cast<unsigned char>(scheme[0])) ||
        !std::all_of(scheme.begin(), scheme.end(), [](unsigned char c) {
            return std::isalnum(c) || c == '+' || c == '-' || c == '.';
        })) {
        throw MalformedUrl(raw, "invalid scheme");
    }

    std::string_view rest = std::string_view(raw).substr(sep + 3);
    const std::size_t auth_end = std::min(rest.find_first_of("/?#"), rest.size());
    std::string_view authority = rest.substr(0, auth_end);
    rest.remove_prefix(auth_end);

    std::string userinfo;
    if (const std::size_t at = authority.rfind('@'); at != std::string_view::npos) {
        userinfo = std::string(authority.substr(0, at + 1));
        authority.remove_prefix(at + 1);
    }

    std::string host;
    std::string_view port;
    if (!authority.empty() && authority.front() == '[') {
        const std::size_t close = authority.find(']');
        if (close == std::string_view::npos) throw MalformedUrl(raw, "unterminated IPv6 literal");
        host = std::string(authority.substr(0, close + 1));
        std::string_view tail = authority.substr(close + 1);
        if (!tail.empty()) {
            if (tail.front() != ':') throw MalformedUrl(raw, "garbage after IPv6 literal");
            port = tail.substr(1);
        }
    } else {
        const std::size_t colon = authority.rfind(':');
        host = std::string(authority.substr(0, colon));
        if (colon != std::string_view::npos) port = authority.substr(colon + 1);
        if (!std::all_of(host.begin(), host.end(),
                         [](unsigned char c) { return valid_host_char(c); })) {
            throw MalformedUrl(raw, "invalid character in host");
        }
        while (!host.empty() && host.back() == '.') host.pop_back();
    }
    if (host.empty()) throw MalformedUrl(raw, "missing host");

    std::string port_text;
    if (!port.empty()) {
        if (port.size() > 5 || !std::all_of(port.begin(), port.end(), [](unsigned char c) {
                return std::isdigit(c) != 0;
            })) {
            throw MalformedUrl(raw, "invalid port");
        }
        const int value = std::stoi(std::string(port));
        if (value > 65535) throw MalformedUrl(raw, "port out of range");
        port_text = std::to_string(value);
    }

    if (policy.lowercase_host) host = to_lower_ascii(host);
    if (policy.strip_www) {
        while (host.size() > 4 && to_lower_ascii(host.substr(0, 4)) == "www." &&
               host.find('.', 4) != std::string::npos) {
            host.erase(0, 4);
        }
    }

    const std::string out_scheme =
        policy.collapse_scheme && is_web_scheme(scheme) ? std::string("https") : scheme;
    if (policy.strip_default_port && !port_text.empty()) {
        const bool is_default =
            port_text == default_port(scheme) || port_text == default_port(out_scheme) ||
            (policy.collapse_scheme && is_web_scheme(scheme) &&
             (port_text == "80" || port_text == "443"));
        if (is_default) port_text.clear();
    }

    // Split path / query / fragment.
    std::string_view fragment;
    bool has_fragment = false;
    if (const std::size_t hash = rest.find('#'); hash != std::string_view::npos) {
        fragment = rest.substr(hash + 1);
        has_fragment = true;
        rest = rest.substr(0, hash);
    }
    std::string_view query;
    bool has_query = false;
    if (const std::size_t q = rest.find('?'); q != std::string_view::npos) {
        query = rest.substr(q + 1);
        has_query = true;
        rest = rest.substr(0, q);
    }

    std::string path = normalize_percent(rest, Component::Path);
    if (path.empty() || path.front() != '/') path.insert(path.begin(), '/');
    path = remove_dot_segments(path);
    if (policy.lowercase_path) path = lowercase_outside_escapes(path);
    if (policy.strip_trailing_slash) {
        while (path.size() > 1 && path.back() == '/') path.pop_back();
    }
    if (policy.strip_page_extensions) strip_page_extensions(path, policy.page_extensions);

    std::vector<std::string> params;
    if (has_query) {
        std::size_t pos = 0;
        while (pos <= query.size()) {
            std::size_t amp = query.find('&', pos);
            if (amp == std::string_view::npos) amp = query.size();
            std::string_view param = query.substr(pos, amp - pos);
            pos = amp + 1;
            if (param.empty()) continue;
            std::string normalized = normalize_percent(param, Component::Query);
            if (policy.strip_tracking_params) {
                const std::string key = normalized.substr(0, normalized.find('='));
                const bool tracked = std::any_of(
                    policy.tracking_params.begin(), policy.tracking_params.end(),
                    [&](const std::string& pattern) { return glob_match(pattern, key); });
                if (tracked) continue;
            }
            params.push_back(std::move(normalized));
        }
        if (policy.sort_query_params) std::sort(params.begin(), params.end());
    }

    std::string out = out_scheme;
    out += "://";
    out += userinfo;
    out += host;
    if (!port_text.empty()) {
        out += ':';
        out += port_text;
    }
    out += path;
    for (std::size_t i = 0; i < params.size(); ++i) {
        out += i == 0 ? '?' : '&';
        out += params[i];
    }
    if (has_fragment && !policy.strip_fragment && !fragment.empty()) {
        out += '#';
        out += normalize_percent(fragment, Component::Fragment);
    }
    return out;
}

std::string_view to_string(GroupingMode mode) noexcept {
    return mode == GroupingMode::KeepAll ? "keep-all" : "collapse";
}

GroupingMode parse_grouping_mode(std::string_view text) {
    if (text == "keep-all") return GroupingMode::KeepAll;
    if (text == "collapse" || text == "collapse-to-host-prefix") return GroupingMode::CollapseToHost;
    throw std::invalid_argument("unknown grouping mode: " + std::string(text));
}

std::string site_of(const PageId& page) {
    const std::string& url = page.url();
    const std::size_t sep = url.find("://");
    if (sep == std::string::npos) return url;
    const std::size_t end = url.find_first_of("/?#", sep + 3);
    return url.substr(0, end);
}

std::vector<PageId> group_subpages(std::span<const PageId> results, GroupingMode mode) {
    if (mode == GroupingMode::KeepAll) return {results.begin(), results.end()};
    std::vector<PageId> out;
    std::set<std::string> seen_sites;
    for (const auto& page : results) {
        if (seen_sites.insert(site_of(page)).second) out.push_back(page);
    }
    return out;
}

}  // namespace serank
