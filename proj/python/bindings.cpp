#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "serank/canonicalize.hpp"
#include "serank/core_model.hpp"
#include "serank/ingest.hpp"
#include "serank/report.hpp"
#include "serank/scoring.hpp"
#include "serank/stats.hpp"
#include "serank/synth.hpp"

namespace py = pybind11;
using namespace serank;

namespace {

using ScoreDict = std::map<std::string, double>;

PageScores to_page_scores(const ScoreDict& in) {
    PageScores out;
    for (const auto& [url, r] : in) out.emplace(PageId(url), r);
    return out;
}

ScoreDict to_dict(const PageScores& in) {
    ScoreDict out;
    for (const auto& [page, r] : in) out.emplace(page.url(), r);
    return out;
}

std::vector<std::string> to_urls(const std::vector<PageId>& pages) {
    std::vector<std::string> out;
    out.reserve(pages.size());
    for (const auto& p : pages) out.push_back(p.url());
    return out;
}

std::vector<PageId> to_pages(const std::vector<std::string>& urls) {
    std::vector<PageId> out;
    out.reserve(urls.size());
    for (const auto& u : urls) out.emplace_back(u);
    return out;
}

IngestOptions make_options(std::optional<std::vector<double>> ctr, const std::string& grouping,
                           const std::string& missing, std::optional<CanonicalizationPolicy> policy) {
    IngestOptions options;
    if (ctr) options.ctr = CtrProfile(*ctr);
    options.grouping = parse_grouping_mode(grouping);
    options.missing = parse_missing_policy(missing);
    if (policy) options.canonicalization = *policy;
    return options;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "CTR-weighted consensus ranking of search-engine result pages";

    py::register_exception<MalformedUrl>(m, "MalformedUrl", PyExc_ValueError);
    py::register_exception<IngestError>(m, "IngestError", PyExc_RuntimeError);
    py::register_exception<FetchError>(m, "FetchError", PyExc_RuntimeError);

    py::class_<CanonicalizationPolicy>(m, "CanonicalizationPolicy")
        .def(py::init<>())
        .def_readwrite("lowercase_host", &CanonicalizationPolicy::lowercase_host)
        .def_readwrite("lowercase_path", &CanonicalizationPolicy::lowercase_path)
        .def_readwrite("strip_fragment", &CanonicalizationPolicy::strip_fragment)
        .def_readwrite("strip_tracking_params", &CanonicalizationPolicy::strip_tracking_params)
        .def_readwrite("strip_trailing_slash", &CanonicalizationPolicy::strip_trailing_slash)
        .def_readwrite("collapse_scheme", &CanonicalizationPolicy::collapse_scheme)
        .def_readwrite("strip_default_port", &CanonicalizationPolicy::strip_default_port)
        .def_readwrite("sort_query_params", &CanonicalizationPolicy::sort_query_params)
        .def_readwrite("strip_www", &CanonicalizationPolicy::strip_www)
        .def_readwrite("strip_page_extensions", &CanonicalizationPolicy::strip_page_extensions)
        .def_readwrite("tracking_params", &CanonicalizationPolicy::tracking_params)
        .def_readwrite("page_extensions", &CanonicalizationPolicy::page_extensions);

    m.def("canonical_url",
          [](const std::string& raw, std::optional<CanonicalizationPolicy> policy) {
              return canonicalize_url(raw, policy.value_or(CanonicalizationPolicy{}));
          },
          py::arg("raw"), py::arg("policy") = py::none());
    m.def("group_subpages",
          [](const std::vector<std::string>& urls, const std::string& mode) {
              return to_urls(group_subpages(to_pages(urls), parse_grouping_mode(mode)));
          },
          py::arg("urls"), py::arg("mode") = "keep-all");

    m.def("default_ctr", [] { return CtrProfile::standard().weights(); });

    py::class_<Corpus>(m, "Corpus")
        .def_property_readonly("engines",
                               [](const Corpus& c) {
                                   std::vector<std::string> out;
                                   for (const auto& e : c.engines()) out.push_back(e.name());
                                   return out;
                               })
        .def_property_readonly("keywords",
                               [](const Corpus& c) {
                                   std::vector<std::string> out;
                                   for (const auto& k : c.keywords()) out.push_back(k.text());
                                   return out;
                               })
        .def_property_readonly("ctr", [](const Corpus& c) { return c.ctr().weights(); })
        .def("results",
             [](const Corpus& c, const std::string& engine, const std::string& keyword) {
                 const RankingSnapshot* snap = c.find(EngineId(engine), Keyword(keyword));
                 if (snap == nullptr) throw py::key_error(engine + " / " + keyword);
                 return to_urls(snap->results);
             })
        .def("violations", [](const Corpus& c) {
            std::vector<std::string> out;
            for (const auto& v : validate_corpus(c)) out.push_back(describe(v));
            return out;
        });

    m.def("build_corpus",
          [](const std::vector<std::tuple<std::string, std::string, std::vector<std::string>>>& records,
             std::optional<std::vector<double>> ctr, const std::string& grouping,
             const std::string& missing, std::optional<CanonicalizationPolicy> policy) {
              std::vector<RawSnapshotRecord> raw;
              for (const auto& [engine, keyword, results] : records)
                  raw.push_back({engine, keyword, std::nullopt, results});
              return build_corpus(raw, make_options(ctr, grouping, missing, policy)).corpus;
          },
          py::arg("records"), py::arg("ctr") = py::none(), py::arg("grouping") = "keep-all",
          py::arg("missing") = "fail", py::arg("policy") = py::none(),
          "Build a corpus from (engine, keyword, [urls]) tuples.");
    m.def("load_corpus",
          [](const std::filesystem::path& path, std::optional<std::vector<double>> ctr,
             const std::string& grouping, const std::string& missing,
             std::optional<CanonicalizationPolicy> policy) {
              return load_corpus(path, make_options(ctr, grouping, missing, policy)).corpus;
          },
          py::arg("path"), py::arg("ctr") = py::none(), py::arg("grouping") = "keep-all",
          py::arg("missing") = "fail", py::arg("policy") = py::none());

    m.def("page_scores",
          [](const Corpus& c, const std::string& keyword) { return to_dict(page_scores(c, Keyword(keyword))); });
    m.def("engine_score", [](const Corpus& c, const std::string& engine, const std::string& keyword) {
        const Keyword k(keyword);
        return engine_score(c, EngineId(engine), k, page_scores(c, k));
    });
    m.def("engine_mean_score", [](const std::vector<double>& v) { return engine_mean_score(v); });
    m.def("consensus_ranking",
          [](const ScoreDict& scores, std::optional<std::vector<double>> ctr) {
              const CtrProfile profile = ctr ? CtrProfile(*ctr) : CtrProfile::standard();
              return to_urls(consensus_ranking(to_page_scores(scores), profile));
          },
          py::arg("scores"), py::arg("ctr") = py::none());
    m.def("consensus_score",
          [](const std::vector<std::string>& ranking, const ScoreDict& scores,
             std::optional<std::vector<double>> ctr) {
              const CtrProfile profile = ctr ? CtrProfile(*ctr) : CtrProfile::standard();
              return consensus_score(to_pages(ranking), to_page_scores(scores), profile);
          },
          py::arg("ranking"), py::arg("scores"), py::arg("ctr") = py::none());

    py::class_<ScoreTable>(m, "ScoreTable")
        .def_property_readonly("engines",
                               [](const ScoreTable& t) {
                                   std::vector<std::string> out;
                                   for (const auto& e : t.engines) out.push_back(e.name());
                                   return out;
                               })
        .def_property_readonly("keywords",
                               [](const ScoreTable& t) {
                                   std::vector<std::string> out;
                                   for (const auto& k : t.keywords) out.push_back(k.text());
                                   return out;
                               })
        .def_readonly("engine_scores", &ScoreTable::engine_scores)
        .def_readonly("engine_means", &ScoreTable::engine_means)
        .def_readonly("consensus_scores", &ScoreTable::consensus_scores)
        .def_readonly("consensus_mean", &ScoreTable::consensus_mean)
        .def_property_readonly("consensus", [](const ScoreTable& t) {
            std::vector<std::vector<std::string>> out;
            for (const auto& c : t.consensus) out.push_back(to_urls(c));
            return out;
        });
    m.def("compute_scores", [](const Corpus& c) { return compute_scores(c); });

    m.def("confidence_interval",
          [](const std::vector<double>& values, double level) {
              const auto ci = confidence_interval({"sample", values}, level);
              return std::make_pair(ci.mean, ci.half_width);
          },
          py::arg("values"), py::arg("level") = 0.95);
    m.def("paired_t_test",
          [](const std::vector<double>& a, const std::vector<double>& b) {
              const auto r = paired_t_test({"a", a}, {"b", b});
              return py::dict(py::arg("t") = r.t, py::arg("p") = r.p, py::arg("dof") = r.dof,
                              py::arg("exact_separation") = r.exact_separation);
          });
    m.def("student_t_two_sided_p", &student_t_two_sided_p, py::arg("t"), py::arg("nu"));
    m.def("regularized_incomplete_beta", &regularized_incomplete_beta, py::arg("x"), py::arg("a"),
          py::arg("b"));
    m.def("normal_quantile", &normal_quantile);

    m.def("overlap_curve", [](const Corpus& c, const std::string& engine) {
        return overlap_curve(compute_scores(c), c, EngineId(engine)).points;
    });
    m.def("relative_scores", [](const Corpus& c) {
        const auto rel = relative_scores(compute_scores(c));
        std::map<std::string, std::vector<std::pair<std::string, double>>> out;
        for (const auto& d : rel.engines) {
            auto& v = out[d.engine];
            for (const auto& e : d.values) v.emplace_back(e.keyword, e.value);
        }
        return out;
    });
    m.def("extreme_queries",
          [](const std::vector<std::pair<std::string, double>>& values, std::size_t n,
             const std::string& direction) {
              RelativeScoreDistribution d;
              for (const auto& [k, v] : values) d.values.push_back({k, v});
              const auto dir = direction == "lowest" ? Direction::Lowest : Direction::Highest;
              std::vector<std::pair<std::string, double>> out;
              for (const auto& e : extreme_queries(d, n, dir).entries) out.emplace_back(e.keyword, e.value);
              return out;
          },
          py::arg("values"), py::arg("n") = 10, py::arg("direction") = "highest");

    m.def("run_pipeline",
          [](const std::filesystem::path& config_path) {
              std::vector<std::string> out;
              for (const auto& f : run_pipeline(load_run_config(config_path)).files) out.push_back(f.string());
              return out;
          },
          py::arg("config_path"));

    m.def("synthetic_records",
          [](std::uint64_t seed) {
              std::vector<std::tuple<std::string, std::string, std::vector<std::string>>> out;
              for (const auto& r : generate_synthetic(web_like_config(seed)))
                  out.emplace_back(r.engine, r.keyword, r.results);
              return out;
          },
          py::arg("seed") = 42);
}
