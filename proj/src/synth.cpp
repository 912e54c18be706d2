#include "serank/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace serank {
namespace {

// Portable draws on top of mt19937_64, whose output sequence is fixed by
// the standard.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * n); }

    double gaussian() {
        if (spare_) {
            double v = *spare_;
            spare_.reset();
            return v;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

std::string slugify(std::string_view text) {
    std::string out;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            out += static_cast<char>(std::tolower(c));
        } else if (!out.empty() && out.back() != '-') {
            out += '-';
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out.empty() ? "q" : out;
}

struct PoolPage {
    std::string domain;
    std::string path;
    double log_relevance = 0.0;
};

// A non-canonical spelling of https://<domain><path> that canonicalizes back.
std::string variant_url(const PoolPage& page, Rng& rng) {
    switch (rng.below(4)) {
        case 0: return "http://www." + page.domain + page.path;
        case 1: {
            std::string upper = page.path;
            std::transform(upper.begin(), upper.end(), upper.begin(),
                           [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
            return "https://" + page.domain + upper;
        }
        case 2: return "https://" + page.domain + page.path + "/?utm_source=serp#top";
        default: return "HTTPS://WWW." + page.domain + ":443" + page.path + ".html";
    }
}

}  // namespace

std::vector<RawSnapshotRecord> generate_synthetic(const SynthConfig& config) {
    if (config.engines.empty()) throw std::invalid_argument("synthetic corpus needs an engine");
    if (config.keywords.empty()) throw std::invalid_argument("synthetic corpus needs a keyword");
    if (config.display_length == 0 || config.pool_size == 0)
        throw std::invalid_argument("display length and pool size must be positive");

    std::map<std::string, std::size_t> index;
    for (std::size_t j = 0; j < config.engines.size(); ++j) {
        const auto& e = config.engines[j];
        if (e.mirror_of) {
            auto it = index.find(*e.mirror_of);
            if (it == index.end())
                throw std::invalid_argument("engine '" + e.name + "' mirrors '" + *e.mirror_of +
                                            "', which is not an earlier engine");
        }
        index.emplace(e.name, j);
    }

    std::vector<std::string> own_domains;
    for (const auto& e : config.engines)
        own_domains.insert(own_domains.end(), e.own_domains.begin(), e.own_domains.end());

    Rng rng(config.seed);
    const std::size_t n = config.engines.size();
    const std::size_t m = config.keywords.size();
    // [engine][keyword]
    std::vector<std::vector<RawSnapshotRecord>> out(n, std::vector<RawSnapshotRecord>(m));

    for (std::size_t k = 0; k < m; ++k) {
        const std::string slug = slugify(config.keywords[k]);
        std::vector<PoolPage> pool(config.pool_size);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            auto& page = pool[i];
            if (!own_domains.empty() && rng.uniform() < 0.1) {
                page.domain = own_domains[rng.below(own_domains.size())];
            } else {
                page.domain = "site" + std::to_string(rng.below(40)) + ".example";
            }
            page.path = "/" + slug + "/" + std::to_string(i);
            page.log_relevance = -0.25 * static_cast<double>(i) + 0.5 * rng.gaussian();
        }

        std::vector<std::vector<double>> perceived(n);
        for (std::size_t j = 0; j < n; ++j) {
            const auto& e = config.engines[j];
            const std::vector<double>* base = e.mirror_of ? &perceived[index.at(*e.mirror_of)] : nullptr;
            auto& scores = perceived[j];
            scores.resize(pool.size());
            for (std::size_t i = 0; i < pool.size(); ++i) {
                double s = base ? (*base)[i] : pool[i].log_relevance;
                s += e.noise * rng.gaussian();
                if (e.bias != 0.0 &&
                    std::find(e.own_domains.begin(), e.own_domains.end(), pool[i].domain) !=
                        e.own_domains.end()) {
                    s += e.bias;
                }
                scores[i] = s;
            }

            std::vector<std::size_t> order(pool.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });

            std::size_t length = std::min(config.display_length, pool.size());
            if (e.short_list_prob > 0.0 && rng.uniform() < e.short_list_prob && length > 1) {
                length = length / 2 + rng.below(length - length / 2);
            }

            RawSnapshotRecord rec;
            rec.engine = e.name;
            rec.keyword = config.keywords[k];
            for (std::size_t p = 0; p < length; ++p) {
                const PoolPage& page = pool[order[p]];
                if (rng.uniform() < config.url_variant_prob) {
                    rec.results.push_back(variant_url(page, rng));
                } else {
                    rec.results.push_back("https://" + page.domain + page.path);
                }
            }
            out[j][k] = std::move(rec);
        }
    }

    std::vector<RawSnapshotRecord> flat;
    flat.reserve(n * m);
    for (auto& row : out)
        for (auto& rec : row) flat.push_back(std::move(rec));
    return flat;
}

std::vector<SynthEngine> web_like_engines() {
    return {
        {"google", 1.8, std::nullopt, 1.5, {"google.com", "youtube.com"}, 0.0},
        {"bing", 1.6, std::nullopt, 1.5, {"msn.com", "skype.com", "microsoft.com"}, 0.0},
        {"yahoo", 0.6, std::string("bing"), 1.2, {"yahoo.com"}, 0.0},
        {"aol", 0.8, std::string("bing"), 1.2, {"aol.com"}, 0.0},
        {"ask", 8.0, std::nullopt, 0.0, {}, 0.4},
        {"duckduckgo", 0.6, std::string("bing"), 0.0, {}, 0.0},
        {"ecosia", 0.75, std::string("bing"), 0.0, {}, 0.0},
        {"startpage", 0.6, std::string("google"), 0.0, {}, 0.0},
        {"qwant", 1.9, std::nullopt, 0.0, {}, 0.0},
    };
}

const std::vector<std::string>& sample_keywords() {
    static const std::vector<std::string> keywords = {
        "how many days until christmas", "how to cook quinoa", "what does hmu mean",
        "how to take a screenshot on a mac", "cricbuzz", "how much house can i afford",
        "how to draw a dog", "how to get rid of blackheads", "MercadoLibre", "what time is sunset",
        "craigslist", "ebay kleinanzeigen", "omegle", "speedometer test",
        "how to take a screenshot", "who sings this song", "crikbuzz", "how to screenshot on mac",
        "what is my ip address", "how to write a cover letter", "what is my ip",
        "how to download videos from youtube", "how to make french toast", "flipkart",
        "home-depot", "national basketball association", "how many centimeters in an inch",
        "restaurant", "how many ounces in a liter", "when we were young",
        "what time is it in california", "how many mb in a gb", "tiempos", "irctc", "weather",
        "how many days till christmas", "what time is it in london", "how to write a check",
        "amazon", "how old is justin bieber", "juegos", "euro 2016", "why is the sky blue",
        "mailen", "how many people are in the world", "bed 365", "tubemate", "convertidos",
        "yahoomail", "skype", "when is fathers day", "traduttor", "bbc news", "google maps",
        "mail", "ikea", "how many ounces in a quart", "where are you now", "minecraft", "gmail",
        "traductor google", "how to start a business", "how to make money", "daily mail", "msn",
        "youtube", "when is mothers day", "football association", "messenger", "games", "news",
        "youtube mp3", "hotmail", "how tall is kevin hart", "google drive", "pokemon go",
        "oranges", "outlook", "ryanair", "how do you spell", "myn", "putlocker", "zalando",
        "how to make money fast", "mincraft", "zara", "what time is it in australia", "aleg",
        "what is your name", "instagram", "what is the temperature", "facebook", "cnn",
        "how old is hillary clinton", "traduttore", "how many weeks in a year", "pandora",
        "how to make pancakes",
    };
    return keywords;
}

SynthConfig web_like_config(std::uint64_t seed) {
    SynthConfig config;
    config.engines = web_like_engines();
    config.keywords = sample_keywords();
    config.seed = seed;
    return config;
}

}  // namespace serank
