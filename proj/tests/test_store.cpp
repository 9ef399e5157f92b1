#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "spamwatch/store.hpp"

using namespace spamwatch;
namespace fs = std::filesystem;

namespace {

fs::path temp_store(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("spamwatch_store_" + name + ".jsonl");
    std::error_code ec;
    fs::remove(p, ec);
    return p;
}

BotGroup make_group(const std::string& id, const std::string& keyword, Timestamp at) {
    BotGroup g;
    g.group_id = id;
    g.trigger_keyword = keyword;
    g.members = {"a_" + id, "b_" + id};
    g.candidate_size = 2;
    g.frequent_tweets = {"text for " + id};
    g.dominant_url = "http://" + keyword + "/" + id;
    g.detected_at = at;
    g.min_duplicate_factor_used = 3;
    g.overlap_ratio_used = 0.6;
    Account acc;
    acc.account_id = "a_" + id;
    acc.screen_name = "sn_" + id;
    acc.statuses_count = 10;
    acc.friends_count = 5;
    acc.followers_count = 2;
    acc.lang = "en";
    acc.created_at = 1000;
    g.member_profiles.push_back(acc);
    return g;
}

}  // namespace

TEST_CASE("record then fetch round-trips") {
    DetectionStore store("");  // memory-only
    BotGroup g = make_group("g1", "dld.bz", 5000);
    store.record(g);
    auto fetched = store.group_by_id("g1");
    REQUIRE(fetched);
    CHECK((*fetched)["keyword"] == "dld.bz");
    CHECK((*fetched)["bot_count"] == 2);
    CHECK((*fetched)["dominant_url"] == "http://dld.bz/g1");
    CHECK_FALSE(store.group_by_id("nope"));

    auto accounts = store.accounts_of_group("g1");
    REQUIRE(accounts.size() == 1);
    CHECK(accounts[0].screen_name == "sn_g1");
}

TEST_CASE("keyword and date queries return exact subsets") {
    DetectionStore store("");
    const char* keywords[] = {"dld.bz", "bit.ly", "ow.ly", "goo.gl"};
    for (int i = 0; i < 10000; ++i)
        store.record(make_group("g" + std::to_string(i), keywords[i % 4],
                                1504224000 + (i % 7) * kSecondsPerDay));
    CHECK(store.group_count() == 10000);
    auto dld = store.groups("dld.bz");
    CHECK(dld.size() == 2500);
    for (const auto& g : dld) CHECK(g["keyword"] == "dld.bz");
    auto day0 = store.groups("", "2017-09-01");
    CHECK(day0.size() == 10000 / 7 + (10000 % 7 ? 1 : 0));
    for (const auto& g : day0) CHECK(g["detected_at"].get<std::string>().substr(0, 10) == "2017-09-01");
    auto both = store.groups("bit.ly", "2017-09-02");
    for (const auto& g : both) {
        CHECK(g["keyword"] == "bit.ly");
        CHECK(g["detected_at"].get<std::string>().substr(0, 10) == "2017-09-02");
    }
}

TEST_CASE("store survives restart with identical state") {
    auto path = temp_store("restart");
    std::vector<nlohmann::json> before;
    {
        DetectionStore store(path.string());
        for (int i = 0; i < 50; ++i)
            store.record(make_group("g" + std::to_string(i), "dld.bz", 1000 + i));
        DailyStat s{"2017-09-01", "dld.bz", 30, 100, 30.0};
        store.record(s);
        Campaign c;
        c.registrant_email = "e@example.com";
        c.domains = {"d.example"};
        c.botnets = {"g0"};
        c.total_accounts = 2;
        store.record(c);
        store.record(BlacklistEntry{BlacklistKind::Email, "e@example.com", {"g0"}, 10, 20});
        before = store.groups();
    }
    DetectionStore reopened(path.string());
    CHECK(reopened.groups() == before);
    CHECK(reopened.daily_stats("dld.bz").size() == 1);
    CHECK(reopened.campaigns().size() == 1);
    CHECK(reopened.blacklist_entries().size() == 1);
}

TEST_CASE("a torn trailing line is dropped at recovery") {
    auto path = temp_store("torn");
    {
        DetectionStore store(path.string());
        store.record(make_group("g_ok", "dld.bz", 1000));
    }
    {
        std::ofstream out(path, std::ios::app | std::ios::binary);
        out << R"({"type":"botnet","record":{"group_id":"g_half","keyw)";  // crash mid-write
    }
    DetectionStore recovered(path.string());
    CHECK(recovered.group_count() == 1);
    CHECK(recovered.group_by_id("g_ok"));
    CHECK_FALSE(recovered.group_by_id("g_half"));

    // and the store still accepts writes afterwards
    recovered.record(make_group("g_after", "dld.bz", 2000));
    DetectionStore again(path.string());
    CHECK(again.group_count() == 2);
}

TEST_CASE("re-recording a group id upserts") {
    DetectionStore store("");
    store.record(make_group("g1", "dld.bz", 1000));
    BotGroup updated = make_group("g1", "dld.bz", 9999);
    store.record(updated);
    CHECK(store.group_count() == 1);
    CHECK((*store.group_by_id("g1"))["detected_at"] == format_timestamp(9999));
}

TEST_CASE("daily stats filter by keyword and stay sorted") {
    DetectionStore store("");
    store.record(DailyStat{"2017-09-02", "dld.bz", 3, 10, 30.0});
    store.record(DailyStat{"2017-09-01", "dld.bz", 5, 10, 50.0});
    store.record(DailyStat{"2017-09-01", "bit.ly", 1, 10, 10.0});
    auto all = store.daily_stats();
    REQUIRE(all.size() == 3);
    CHECK(all[0]["keyword"] == "bit.ly");
    auto dld = store.daily_stats("dld.bz");
    REQUIRE(dld.size() == 2);
    CHECK(dld[0]["date"] == "2017-09-01");
    CHECK(dld[1]["date"] == "2017-09-02");
}
