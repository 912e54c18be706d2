#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "serank/ingest.hpp"

namespace fs = std::filesystem;

namespace serank {
namespace {

const fs::path kReplay = fs::path(SERANK_DATA_DIR) / "replay";

RawSnapshotRecord rec(std::string engine, std::string keyword, std::vector<std::string> results) {
    return {std::move(engine), std::move(keyword), std::nullopt, std::move(results)};
}

fs::path temp_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("serank_ingest_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> urls_of(const Corpus& c, const std::string& engine, const std::string& keyword) {
    std::vector<std::string> out;
    for (const auto& p : c.find(EngineId(engine), Keyword(keyword))->results) out.push_back(p.url());
    return out;
}

TEST(RecordTest, JsonRoundTrip) {
    RawSnapshotRecord r{"google", "weather", "2018-02-15T10:00:00Z", {"https://a.com/", "https://b.com/"}};
    const auto line = to_json_line(r);
    EXPECT_EQ(line,
              R"({"engine":"google","keyword":"weather","captured_at":"2018-02-15T10:00:00Z",)"
              R"("results":["https://a.com/","https://b.com/"]})");
    EXPECT_EQ(parse_record(line), r);
}

TEST(RecordTest, RejectsBadRecords) {
    EXPECT_THROW(parse_record("not json"), std::invalid_argument);
    EXPECT_THROW(parse_record(R"({"engine":"g","results":[]})"), std::invalid_argument);
    EXPECT_THROW(parse_record(R"({"engine":"g","keyword":"k","results":[1]})"), std::invalid_argument);
    EXPECT_THROW(parse_record(R"({"engine":"","keyword":"k","results":[]})"), std::invalid_argument);
    EXPECT_THROW(parse_record(R"({"engine":"g","keyword":"k","results":[],"extra":1})"),
                 std::invalid_argument);
    std::string many = R"({"engine":"g","keyword":"k","results":[)";
    for (int i = 0; i <= 100; ++i) many += (i ? ",\"" : "\"") + std::string("https://x/") + std::to_string(i) + "\"";
    many += "]}";
    EXPECT_THROW(parse_record(many), std::invalid_argument);
}

TEST(BuildCorpusTest, VariantsCollapseToOnePage) {
    const auto out = build_corpus({rec("g", "k", {"http://www.a.com/X", "https://a.com/x"})}, {});
    EXPECT_EQ(urls_of(out.corpus, "g", "k"), std::vector<std::string>{"https://a.com/x"});
}

TEST(BuildCorpusTest, OrderAndCanonicalUrls) {
    const auto out = build_corpus({rec("Bing", "b", {"https://x.com/1"}), rec("google", "a", {"https://y.com/"}),
                                   rec("bing", "a", {}), rec("google", "b", {"HTTP://Y.com:80/Q/"})},
                                  {});
    const auto& c = out.corpus;
    ASSERT_EQ(c.engine_count(), 2u);
    EXPECT_EQ(c.engines()[0].name(), "bing");
    EXPECT_EQ(c.keywords()[0].text(), "b");
    EXPECT_EQ(urls_of(c, "google", "b"), std::vector<std::string>{"https://y.com/q"});
    EXPECT_TRUE(validate_corpus(c).empty());
}

TEST(BuildCorpusTest, MissingSnapshotPolicies) {
    const std::vector<RawSnapshotRecord> records = {rec("g", "a", {"https://a/"}), rec("b", "a", {"https://a/"}),
                                                    rec("g", "c", {"https://c/"})};
    EXPECT_THROW(build_corpus(records, {}), MissingSnapshot);

    IngestOptions drop;
    drop.missing = MissingPolicy::DropKeyword;
    const auto out = build_corpus(records, drop);
    EXPECT_EQ(out.corpus.keyword_count(), 1u);
    EXPECT_EQ(out.report.dropped_keywords, std::vector<std::string>{"c"});
    ASSERT_FALSE(out.report.warnings.empty());
    EXPECT_NE(out.report.warnings.back().find("dropped keyword 'c'"), std::string::npos);

    EXPECT_THROW(build_corpus({rec("g", "a", {}), rec("b", "c", {})}, drop), EmptyCorpus);
    EXPECT_THROW(build_corpus({}, drop), EmptyCorpus);
}

TEST(BuildCorpusTest, MalformedUrlIsSkippedAndReported) {
    const auto out = build_corpus({rec("g", "k", {"https://a.com/", "not a url", "https://b.com/"})}, {}, {7});
    EXPECT_EQ(urls_of(out.corpus, "g", "k"), (std::vector<std::string>{"https://a.com/", "https://b.com/"}));
    ASSERT_EQ(out.report.skipped_urls.size(), 1u);
    EXPECT_EQ(out.report.skipped_urls[0].line, 7u);
    EXPECT_EQ(out.report.skipped_urls[0].url, "not a url");
}

TEST(BuildCorpusTest, LaterRecordReplacesEarlier) {
    const auto out = build_corpus({rec("g", "k", {"https://old/"}), rec("g", "k", {"https://new/"})}, {});
    EXPECT_EQ(urls_of(out.corpus, "g", "k"), std::vector<std::string>{"https://new/"});
    EXPECT_FALSE(out.report.warnings.empty());
}

TEST(BuildCorpusTest, TruncatedToDisplayLength) {
    std::vector<std::string> urls;
    for (int i = 0; i < 14; ++i) urls.push_back("https://p/" + std::to_string(i));
    const auto out = build_corpus({rec("g", "k", urls)}, {});
    EXPECT_EQ(urls_of(out.corpus, "g", "k").size(), 10u);
    EXPECT_TRUE(validate_corpus(out.corpus).empty());
}

TEST(BuildCorpusTest, CollapseToHost) {
    IngestOptions opt;
    opt.grouping = GroupingMode::CollapseToHost;
    const auto out = build_corpus({rec("g", "k", {"https://a.com/1", "https://a.com/2", "https://b.com/"})}, opt);
    EXPECT_EQ(urls_of(out.corpus, "g", "k"), (std::vector<std::string>{"https://a.com/1", "https://b.com/"}));
}

TEST(LoadCorpusTest, LineNumbersInErrors) {
    std::istringstream in("{\"engine\":\"g\",\"keyword\":\"k\",\"results\":[]}\n\n{oops}\n");
    try {
        load_corpus(in, {});
        FAIL() << "expected MalformedRecord";
    } catch (const MalformedRecord& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(LoadCorpusTest, WriteThenReloadIsIdentical) {
    const auto first = build_corpus({rec("g", "k1", {"http://www.a.com/X/", "https://b.com/?utm_source=x"}),
                                     rec("b", "k1", {"https://b.com/"}), rec("g", "k2", {}),
                                     rec("b", "k2", {"https://c.com/"})},
                                    {});
    std::stringstream buf;
    write_corpus(first.corpus, buf);
    const std::string text = buf.str();
    const auto second = load_corpus(buf, {});
    EXPECT_EQ(first.corpus, second.corpus);
    std::stringstream again;
    write_corpus(second.corpus, again);
    EXPECT_EQ(text, again.str());
}

TEST(LoadCorpusTest, BundledFixtureIsClean) {
    const auto out = load_corpus(fs::path(SERANK_DATA_DIR) / "fixture" / "corpus.jsonl", {});
    EXPECT_EQ(out.corpus.engine_count(), 9u);
    EXPECT_GE(out.corpus.keyword_count(), 90u);
    EXPECT_TRUE(validate_corpus(out.corpus).empty());
    EXPECT_TRUE(out.report.skipped_urls.empty());
}

TEST(CtrCsvTest, LoadsWeights) {
    const auto dir = temp_dir("ctr");
    {
        std::ofstream(dir / "ok.csv") << "position,weight\n1,0.5\n2,0.25\n3,0.1\n";
        std::ofstream(dir / "gap.csv") << "position,weight\n1,0.5\n3,0.25\n";
        std::ofstream(dir / "header.csv") << "pos,w\n1,0.5\n";
    }
    const auto ctr = load_ctr_csv(dir / "ok.csv");
    EXPECT_EQ(ctr.display_length(), 3u);
    EXPECT_DOUBLE_EQ(ctr.weight(2), 0.25);
    EXPECT_THROW(load_ctr_csv(dir / "gap.csv"), std::exception);
    EXPECT_THROW(load_ctr_csv(dir / "header.csv"), std::exception);
    EXPECT_THROW(load_ctr_csv(dir / "absent.csv"), std::exception);
}

TEST(ReplayAdapterTest, ServesStoredSnapshots) {
    ReplayAdapter replay(kReplay);
    const auto r = replay.fetch(EngineId("google"), Keyword("how to cook quinoa"));
    EXPECT_EQ(r.results.size(), 7u);
    EXPECT_EQ(r.captured_at, "2018-02-15T10:00:00Z");
    EXPECT_EQ(to_json_line(r), to_json_line(replay.fetch(EngineId("google"), Keyword("how to cook quinoa"))));
    EXPECT_EQ(replay.path_for(EngineId("bing"), Keyword("how to cook quinoa")).filename(),
              "how%20to%20cook%20quinoa.json");
}

TEST(ReplayAdapterTest, UnknownEngineAndKeyword) {
    ReplayAdapter replay(kReplay);
    try {
        replay.fetch(EngineId("altavista"), Keyword("weather"));
        FAIL() << "expected FetchError";
    } catch (const FetchError& e) {
        EXPECT_EQ(e.kind(), FetchError::Kind::UnknownEngine);
        EXPECT_EQ(e.engine(), "altavista");
    }
    try {
        replay.fetch(EngineId("google"), Keyword("nothing stored"));
        FAIL() << "expected FetchError";
    } catch (const FetchError& e) {
        EXPECT_EQ(e.kind(), FetchError::Kind::UnknownKeyword);
    }
}

TEST(RedirectTest, FollowsChainsAndStopsOnCycles) {
    RedirectingAdapter adapter(std::make_shared<ReplayAdapter>(kReplay),
                               {{"a", "b"}, {"b", "c"}, {"x", "y"}, {"y", "x"}});
    EXPECT_EQ(adapter.resolve("a"), "c");
    EXPECT_EQ(adapter.resolve("c"), "c");
    const auto end = adapter.resolve("x");
    EXPECT_TRUE(end == "x" || end == "y");
}

TEST(RedirectTest, RewritesReplayedResults) {
    auto map = load_redirect_map(kReplay / "redirects.json");
    RedirectingAdapter adapter(std::make_shared<ReplayAdapter>(kReplay), map);
    const auto r = adapter.fetch(EngineId("bing"), Keyword("how to cook quinoa"));
    EXPECT_EQ(r.results.back(), "https://www.bonappetit.com/story/how-to-cook-quinoa");
}

class ThrowingAdapter final : public FetchAdapter {
public:
    RawSnapshotRecord fetch(const EngineId&, const Keyword&) override { throw std::runtime_error("boom"); }
};

TEST(SnapshotViaAdapterTest, WrapsForeignErrors) {
    ThrowingAdapter adapter;
    try {
        snapshot_via_adapter(adapter, EngineId("g"), Keyword("k"));
        FAIL() << "expected FetchError";
    } catch (const FetchError& e) {
        EXPECT_EQ(e.kind(), FetchError::Kind::Other);
        EXPECT_EQ(e.keyword(), "k");
        EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
    }
}

TEST(JsonlAppenderTest, ConcurrentAppendsStayWholeLines) {
    const auto file = temp_dir("append") / "out.jsonl";
    JsonlAppender appender(file);
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] {
            for (int i = 0; i < 25; ++i)
                appender.append(rec("e" + std::to_string(t), "k" + std::to_string(i), {"https://a/"}));
        });
    for (auto& t : threads) t.join();
    std::ifstream in(file);
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
        EXPECT_NO_THROW(parse_record(line));
        ++count;
    }
    EXPECT_EQ(count, 100);
}

TEST(UrlEncodeTest, Components) {
    EXPECT_EQ(url_encode_component("how to cook quinoa"), "how%20to%20cook%20quinoa");
    EXPECT_EQ(url_encode_component("a/b?c~d"), "a%2Fb%3Fc~d");
    EXPECT_EQ(url_encode_component("é"), "%C3%A9");
}

TEST(PolicyNamesTest, RoundTrip) {
    EXPECT_EQ(parse_missing_policy("drop-keyword"), MissingPolicy::DropKeyword);
    EXPECT_EQ(to_string(MissingPolicy::Fail), "fail");
    EXPECT_THROW(parse_missing_policy("ignore"), std::invalid_argument);
}

}  // namespace
}  // namespace serank
