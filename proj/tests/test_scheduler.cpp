#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spamwatch/scheduler.hpp"

using namespace spamwatch;

namespace {
constexpr std::int64_t kDay = 24 * 3600;
}

TEST_CASE("seven configured shorteners all come due one interval in") {
    Schedule schedule;
    const char* shorteners[] = {"bit.ly", "ift.tt", "ow.ly", "goo.gl", "tinyurl.com",
                                "dlvr.it", "dld.bz"};
    for (const char* kw : shorteners) schedule.add_configured(kw, kDay, 30000, 0);

    CHECK(schedule.due_jobs(kDay - 1).empty());
    auto due = schedule.due_jobs(kDay);
    REQUIRE(due.size() == 7);
    for (const Job& j : due) {
        CHECK(j.tweets_per_run == 30000);
        CHECK(j.origin == JobOrigin::Configured);
    }
}

TEST_CASE("fixed-rate advance without drift") {
    Schedule schedule;
    schedule.add_configured("k", 100, 1, 0);  // first due at 100
    auto due = schedule.due_jobs(250);        // late poll
    REQUIRE(due.size() == 1);                 // returned once, not twice
    CHECK(schedule.jobs()[0].next_due == 300);  // stays on the 100-grid

    CHECK(schedule.due_jobs(299).empty());
    CHECK(schedule.due_jobs(300).size() == 1);
    CHECK(schedule.jobs()[0].next_due == 400);
}

TEST_CASE("a job polled every interval runs exactly once per interval") {
    Schedule schedule;
    schedule.add_configured("k", kDay, 1, 0);
    int runs = 0;
    const int m = 50;
    for (int d = 1; d <= m; ++d) runs += static_cast<int>(schedule.due_jobs(d * kDay).size());
    CHECK(runs == m);
}

TEST_CASE("trend triggers get an immediate first run") {
    Schedule schedule;
    Trigger trig{"twitbr.tk", 17, 5000};
    Job& j = schedule.add_keyword(trig, kDay, 30000);
    CHECK(j.origin == JobOrigin::TrendTrigger);
    CHECK(j.next_due == 5000);
    auto due = schedule.due_jobs(5000);
    REQUIRE(due.size() == 1);
    CHECK(due[0].keyword == "twitbr.tk");

    Trigger viid{"viid.me", 3, 6000};
    schedule.add_keyword(viid, kDay, 30000);
    CHECK(schedule.has_keyword("viid.me"));
}

TEST_CASE("duplicate keywords are rejected") {
    Schedule schedule;
    schedule.add_configured("dld.bz", kDay, 1, 0);
    CHECK_THROWS_AS(schedule.add_keyword(Trigger{"dld.bz", 1, 0}, kDay, 1), DuplicateKeyword);
    CHECK_THROWS_AS(schedule.add_configured("dld.bz", kDay, 1, 0), DuplicateKeyword);
    schedule.add_keyword(Trigger{"twitbr.tk", 1, 0}, kDay, 1);
    CHECK_THROWS_AS(schedule.add_keyword(Trigger{"twitbr.tk", 1, 0}, kDay, 1), DuplicateKeyword);
    CHECK(schedule.jobs().size() == 2);  // no keyword appears twice
}
