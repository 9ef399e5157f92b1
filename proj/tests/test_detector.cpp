#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spamwatch/detector.hpp"

using namespace spamwatch;

namespace {

// Independent oracle for the clustering step: literal set arithmetic over
// explicit text sets, no shared code with detect_botnet's implementation
// path beyond the input shape.
struct OracleResult {
    std::set<std::string> frequent;
    std::set<AccountId> bots;
};

OracleResult oracle(const std::map<AccountId, std::set<std::string>>& timelines, int alpha,
                    double beta) {
    OracleResult r;
    std::set<std::string> all_texts;
    for (const auto& [a, texts] : timelines) all_texts.insert(texts.begin(), texts.end());
    for (const std::string& t : all_texts) {
        int holders = 0;
        for (const auto& [a, texts] : timelines)
            if (texts.count(t)) ++holders;
        if (holders >= alpha) r.frequent.insert(t);
    }
    for (const auto& [a, texts] : timelines) {
        if (texts.empty()) continue;
        int overlap = 0;
        for (const std::string& t : texts)
            if (r.frequent.count(t)) ++overlap;
        if (static_cast<double>(overlap) / static_cast<double>(texts.size()) >= beta)
            r.bots.insert(a);
    }
    return r;
}

std::map<AccountId, Timeline> to_timelines(
    const std::map<AccountId, std::set<std::string>>& texts) {
    std::map<AccountId, Timeline> out;
    for (const auto& [a, ts] : texts) {
        Timeline tl;
        tl.account = a;
        tl.texts = ts;
        out.emplace(a, std::move(tl));
    }
    return out;
}

DetectionParams params(int alpha, double beta) {
    DetectionParams p;
    p.min_duplicate_factor = alpha;
    p.overlap_ratio = beta;
    return p;
}

Tweet tweet(const std::string& id, const std::string& author, const std::string& text,
            Timestamp at = 0, std::vector<std::string> urls = {}) {
    Tweet t;
    t.tweet_id = id;
    t.author = author;
    t.user.account_id = author;
    t.text = text;
    t.created_at = at;
    t.embedded_urls = std::move(urls);
    return t;
}

std::map<AccountId, std::set<std::string>> random_instance(std::mt19937_64& rng) {
    std::map<AccountId, std::set<std::string>> instance;
    std::size_t accounts = 1 + rng() % 10;
    std::size_t vocabulary = 1 + rng() % 25;
    for (std::size_t a = 0; a < accounts; ++a) {
        std::size_t n = 1 + rng() % 20;
        std::set<std::string> texts;
        for (std::size_t i = 0; i < n; ++i)
            texts.insert("w" + std::to_string(rng() % vocabulary));
        instance.emplace("a" + std::to_string(a), std::move(texts));
    }
    return instance;
}

}  // namespace

TEST_CASE("worked three-account example") {
    std::map<AccountId, std::set<std::string>> texts = {
        {"a1", {"t1", "t2", "t3", "t4", "t5"}},
        {"a2", {"t1", "t2", "t3", "x", "y"}},
        {"a3", {"t1", "z", "w", "v", "u"}},
    };
    auto r = detect_botnet(to_timelines(texts), params(2, 0.6));
    CHECK(r.frequent_texts == std::set<std::string>{"t1", "t2", "t3"});
    CHECK(r.bots == std::set<AccountId>{"a1", "a2"});

    auto o = oracle(texts, 2, 0.6);
    CHECK(r.frequent_texts == o.frequent);
    CHECK(r.bots == o.bots);
}

TEST_CASE("homogeneous group flags everyone") {
    std::map<AccountId, std::set<std::string>> texts;
    for (int a = 0; a < 6; ++a) texts["a" + std::to_string(a)] = {"s1", "s2", "s3"};
    auto r = detect_botnet(to_timelines(texts), params(3, 0.6));
    CHECK(r.frequent_texts == std::set<std::string>{"s1", "s2", "s3"});
    CHECK(r.bots.size() == 6);
}

TEST_CASE("factor above group size empties both sets") {
    std::map<AccountId, std::set<std::string>> texts = {
        {"a1", {"t"}}, {"a2", {"t"}}, {"a3", {"t"}}};
    auto r = detect_botnet(to_timelines(texts), params(4, 0.2));
    CHECK(r.frequent_texts.empty());
    CHECK(r.bots.empty());
}

TEST_CASE("oracle equivalence on random instances") {
    std::mt19937_64 rng(20170925);
    for (int trial = 0; trial < 1000; ++trial) {
        auto instance = random_instance(rng);
        int alpha = 1 + static_cast<int>(rng() % 5);
        double beta = 0.2 * (1 + static_cast<int>(rng() % 5));
        auto got = detect_botnet(to_timelines(instance), params(alpha, beta));
        auto want = oracle(instance, alpha, beta);
        REQUIRE(got.frequent_texts == want.frequent);
        REQUIRE(got.bots == want.bots);
    }
}

TEST_CASE("monotonicity in both parameters") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        auto instance = random_instance(rng);
        auto timelines = to_timelines(instance);
        for (int alpha = 1; alpha <= 4; ++alpha) {
            auto lo = detect_botnet(timelines, params(alpha, 0.4));
            auto hi = detect_botnet(timelines, params(alpha + 1, 0.4));
            for (const auto& t : hi.frequent_texts) REQUIRE(lo.frequent_texts.count(t));
            for (const auto& a : hi.bots) REQUIRE(lo.bots.count(a));
        }
        for (double beta : {0.2, 0.4, 0.6, 0.8}) {
            auto lo = detect_botnet(timelines, params(2, beta));
            auto hi = detect_botnet(timelines, params(2, beta + 0.2));
            for (const auto& a : hi.bots) REQUIRE(lo.bots.count(a));
        }
    }
}

TEST_CASE("permutation invariance") {
    std::mt19937_64 rng(99);
    auto instance = random_instance(rng);
    auto base = detect_botnet(to_timelines(instance), params(2, 0.5));
    // std::map iteration is ordered; renaming accounts reshuffles the walk
    std::map<AccountId, std::set<std::string>> renamed;
    int i = 0;
    for (auto& [a, texts] : instance)
        renamed["z" + std::to_string(9 - i++) + "_" + a] = texts;
    auto shuffled = detect_botnet(to_timelines(renamed), params(2, 0.5));
    CHECK(base.frequent_texts == shuffled.frequent_texts);
    CHECK(base.bots.size() == shuffled.bots.size());
}

TEST_CASE("group_by_duplicate thresholds and counting") {
    std::vector<Tweet> tweets;
    int id = 0;
    for (int a = 0; a < 25; ++a)
        tweets.push_back(tweet("t" + std::to_string(id++), "x" + std::to_string(a), "same text"));
    for (int a = 0; a < 3; ++a)
        tweets.push_back(tweet("t" + std::to_string(id++), "y" + std::to_string(a), "other text"));
    // one author repeating a text counts once
    tweets.push_back(tweet("t_rep", "x0", "same text"));

    auto groups = group_by_duplicate(tweets, 20, DetectionParams{});
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].seed_text == "same text");
    CHECK(groups[0].accounts.size() == 25);
}

TEST_CASE("group_by_duplicate recovers a planted cluster among noise") {
    std::mt19937_64 rng(4242);
    std::vector<Tweet> tweets;
    int id = 0;
    std::set<AccountId> planted;
    for (int a = 0; a < 30; ++a) {
        std::string acct = "bot" + std::to_string(a);
        planted.insert(acct);
        tweets.push_back(tweet("t" + std::to_string(id++), acct, "planted duplicate text"));
    }
    for (int i = 0; i < 1000 - 30; ++i)
        tweets.push_back(tweet("t" + std::to_string(id++), "h" + std::to_string(i),
                               "unique chatter " + std::to_string(rng())));
    auto groups = group_by_duplicate(tweets, 20, DetectionParams{});
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].accounts == planted);
}

namespace {

class MapProvider : public TimelineProvider {
public:
    std::map<AccountId, std::vector<Tweet>> data;
    std::optional<Timeline> timeline(const AccountId& account, std::size_t depth) override {
        auto it = data.find(account);
        if (it == data.end() || it->second.empty()) return std::nullopt;
        Timeline tl;
        tl.account = account;
        for (auto rit = it->second.rbegin(); rit != it->second.rend() && tl.tweets.size() < depth;
             ++rit)
            tl.tweets.push_back(*rit);
        for (const Tweet& t : tl.tweets) tl.texts.insert(canonicalize_text(t.text));
        return tl;
    }
};

}  // namespace

TEST_CASE("fetch_timelines truncates to depth and keeps short timelines") {
    MapProvider provider;
    for (int i = 0; i < 500; ++i)
        provider.data["deep"].push_back(tweet("d" + std::to_string(i), "deep",
                                              "text " + std::to_string(i), i));
    for (int i = 0; i < 12; ++i)
        provider.data["shallow"].push_back(tweet("s" + std::to_string(i), "shallow",
                                                 "text " + std::to_string(i), i));
    CandidateGroup group{"seed", {"deep", "shallow"}};
    auto fetched = fetch_timelines(group, provider, 200);
    REQUIRE(fetched.timelines.size() == 2);
    CHECK(fetched.timelines.at("deep").tweets.size() == 200);
    // most recent first
    CHECK(fetched.timelines.at("deep").tweets.front().created_at == 499);
    CHECK(fetched.timelines.at("shallow").tweets.size() == 12);
}

TEST_CASE("unavailable accounts drop the group below threshold") {
    MapProvider provider;
    CandidateGroup group;
    group.seed_text = "seed";
    for (int i = 0; i < 21; ++i) {
        std::string acct = "a" + std::to_string(i);
        group.accounts.insert(acct);
        if (i < 19)  // two accounts unavailable
            provider.data[acct].push_back(tweet("t" + std::to_string(i), acct, "seed"));
    }
    auto fetched = fetch_timelines(group, provider, 200);
    CHECK(fetched.timelines.size() == 19);
    CHECK(fetched.unavailable.size() == 2);
    CHECK(fetched.timelines.size() < 20);  // caller drops at threshold 20
}

TEST_CASE("dominant url majority and tie-break") {
    auto make = [&](std::vector<std::pair<std::string, int>> urls) {
        std::map<AccountId, Timeline> timelines;
        Timeline tl;
        tl.account = "a";
        int id = 0;
        for (auto& [u, n] : urls)
            for (int i = 0; i < n; ++i)
                tl.tweets.push_back(tweet("t" + std::to_string(id++), "a", "x", 0, {u}));
        timelines.emplace("a", std::move(tl));
        return timelines;
    };
    CHECK(dominant_embedded_url(make({{"http://u1/a", 10}, {"http://u2/b", 3}})) == "http://u1/a");
    CHECK(dominant_embedded_url(make({{"http://zz/a", 5}, {"http://aa/b", 5}})) == "http://aa/b");
    std::map<AccountId, Timeline> empty_urls;
    Timeline tl;
    tl.account = "a";
    tl.tweets.push_back(tweet("t", "a", "no urls here"));
    empty_urls.emplace("a", std::move(tl));
    CHECK_THROWS_AS(dominant_embedded_url(empty_urls), NoUrls);
}

TEST_CASE("bot traffic fraction") {
    std::vector<Tweet> tweets;
    for (int i = 0; i < 10; ++i)
        tweets.push_back(tweet("t" + std::to_string(i), i < 3 ? "bot" : "human" + std::to_string(i),
                               "x"));
    CHECK(bot_traffic_fraction(tweets, {}) == doctest::Approx(0.0));
    CHECK(bot_traffic_fraction(tweets, {"bot"}) == doctest::Approx(30.0));
    std::set<AccountId> all;
    for (const Tweet& t : tweets) all.insert(t.author);
    CHECK(bot_traffic_fraction(tweets, all) == doctest::Approx(100.0));
}

TEST_CASE("detect_batch deduplicates seeds with one member set") {
    std::vector<Tweet> tweets;
    int id = 0;
    // 25 accounts tweet the same two texts: two candidate groups, one botnet
    for (int a = 0; a < 25; ++a) {
        std::string acct = "b" + std::to_string(a);
        tweets.push_back(tweet("t" + std::to_string(id++), acct, "spam one http://sh.rt/1", a,
                               {"http://sh.rt/1"}));
        tweets.push_back(tweet("t" + std::to_string(id++), acct, "spam two http://sh.rt/2", a,
                               {"http://sh.rt/2"}));
    }
    ArchiveTimelineProvider provider(tweets, DetectionParams{});
    DetectionParams p;
    p.min_group_size = 20;
    auto result = detect_batch(tweets, "sh.rt", provider, p, 1000, 2);
    REQUIRE(result.candidate_groups == 2);
    REQUIRE(result.groups.size() == 1);
    CHECK(result.groups[0].members.size() == 25);
    CHECK(result.groups[0].candidate_size == 25);
    CHECK(result.groups[0].dominant_url == "http://sh.rt/1");  // tie -> lexicographic
    CHECK(result.groups[0].detected_at == 1000);
    CHECK_FALSE(result.groups[0].group_id.empty());
}
