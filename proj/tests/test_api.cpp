#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include "spamwatch/api.hpp"

using namespace spamwatch;
using nlohmann::json;

namespace {

struct Fixture {
    DetectionStore store{""};
    ApiServer api{store};
    int port = 0;

    Fixture() {
        for (int i = 0; i < 250; ++i) {
            BotGroup g;
            g.group_id = "g" + std::string(3 - std::to_string(i).size(), '0') + std::to_string(i);
            g.trigger_keyword = i % 2 ? "dld.bz" : "bit.ly";
            g.detected_at = 1504224000 + i;
            g.min_duplicate_factor_used = 3;
            g.overlap_ratio_used = 0.6;
            g.candidate_size = 21;
            g.dominant_url = "http://sh.rt/" + std::to_string(i);
            for (int a = 0; a < 3; ++a) {
                Account acc;
                acc.account_id = g.group_id + "_a" + std::to_string(a);
                acc.screen_name = "user" + std::to_string(a);
                acc.statuses_count = 100 + a;
                acc.friends_count = 50;
                acc.followers_count = 7;
                acc.lang = "en";
                acc.created_at = 1400000000;
                g.members.insert(acc.account_id);
                g.member_profiles.push_back(acc);
            }
            store.record(g);
        }
        store.record(DailyStat{"2017-09-01", "dld.bz", 30, 100, 30.0});
        store.record(DailyStat{"2017-09-02", "dld.bz", 40, 100, 40.0});
        Campaign c;
        c.registrant_email = "reg@example.com";
        c.domains = {"d.example"};
        c.botnets = {"g001"};
        c.total_accounts = 3;
        store.record(c);
        store.record(BlacklistEntry{BlacklistKind::Email, "reg@example.com", {"g001"}, 1, 2});
        port = api.start(0);
    }

    json get(const std::string& path, int expected_status = 200) {
        httplib::Client cli("127.0.0.1", port);
        auto res = cli.Get(path);
        REQUIRE(res);
        CHECK(res->status == expected_status);
        return json::parse(res->body);
    }
};

}  // namespace

TEST_CASE("groups listing paginates and filters") {
    Fixture fx;
    json page = fx.get("/api/groups");
    CHECK(page["total"] == 250);
    CHECK(page["groups"].size() == 100);  // default limit

    json page2 = fx.get("/api/groups?limit=1000");
    CHECK(page2["groups"].size() == 250);

    json offset = fx.get("/api/groups?limit=10&offset=245");
    CHECK(offset["groups"].size() == 5);

    json filtered = fx.get("/api/groups?keyword=dld.bz&limit=1000");
    CHECK(filtered["total"] == 125);
    for (const auto& g : filtered["groups"]) CHECK(g["keyword"] == "dld.bz");

    json dated = fx.get("/api/groups?date=2017-09-01&limit=1000");
    CHECK(dated["total"] == 250);
}

TEST_CASE("single group fetch and the seven account fields") {
    Fixture fx;
    json g = fx.get("/api/groups/g001");
    CHECK(g["group_id"] == "g001");
    CHECK(g["bot_count"] == 3);
    CHECK(g["member_count"] == 21);
    CHECK(g["dominant_url"] == "http://sh.rt/1");

    json accounts = fx.get("/api/groups/g001/accounts");
    CHECK(accounts["total"] == 3);
    const std::set<std::string> expected = {"id",           "screen_name",     "statuses_count",
                                            "friends_count", "followers_count", "lang",
                                            "created_at"};
    for (const auto& a : accounts["accounts"]) {
        std::set<std::string> keys;
        for (auto it = a.begin(); it != a.end(); ++it) keys.insert(it.key());
        CHECK(keys == expected);
    }
}

TEST_CASE("unknown ids give 404, malformed queries give 400") {
    Fixture fx;
    json e404 = fx.get("/api/groups/doesnotexist", 404);
    CHECK(e404.contains("error"));
    fx.get("/api/groups/doesnotexist/accounts", 404);
    fx.get("/api/campaigns/nobody@example.com", 404);
    json e400 = fx.get("/api/groups?limit=banana", 400);
    CHECK(e400.contains("error"));
    fx.get("/api/groups?offset=-1", 400);
    fx.get("/api/groups?date=09-01-2017", 400);
}

TEST_CASE("campaigns, blacklist and daily stats endpoints") {
    Fixture fx;
    json campaigns = fx.get("/api/campaigns");
    CHECK(campaigns["total"] == 1);
    CHECK(campaigns["campaigns"][0]["registrant_email"] == "reg@example.com");
    json one = fx.get("/api/campaigns/reg@example.com");
    CHECK(one["total_accounts"] == 3);

    json blacklist = fx.get("/api/blacklist");
    CHECK(blacklist["total"] == 1);
    CHECK(blacklist["entries"][0]["kind"] == "email");

    json stats = fx.get("/api/stats/daily?keyword=dld.bz");
    REQUIRE(stats["stats"].size() == 2);
    CHECK(stats["stats"][0]["fraction"] == 30.0);
    CHECK(stats["stats"][1]["date"] == "2017-09-02");
}

TEST_CASE("every recorded group is reachable by listing and by id") {
    Fixture fx;
    json all = fx.get("/api/groups?limit=1000");
    REQUIRE(all["groups"].size() == 250);
    for (const auto& g : all["groups"]) {
        json direct = fx.get("/api/groups/" + g["group_id"].get<std::string>());
        CHECK(direct["group_id"] == g["group_id"]);
    }
}

TEST_CASE("responses are byte-stable across servers over the same store") {
    Fixture fx;
    httplib::Client c1("127.0.0.1", fx.port);
    std::string body1 = c1.Get("/api/groups?limit=1000")->body;

    ApiServer second(fx.store);
    int port2 = second.start(0);
    httplib::Client c2("127.0.0.1", port2);
    std::string body2 = c2.Get("/api/groups?limit=1000")->body;
    CHECK(body1 == body2);
    second.stop();
}

TEST_CASE("health endpoint reports the group count") {
    Fixture fx;
    json health = fx.get("/api/health");
    CHECK(health["status"] == "ok");
    CHECK(health["groups"] == 250);
}
