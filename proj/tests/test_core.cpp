#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spamwatch/core.hpp"

using namespace spamwatch;

TEST_CASE("netloc extraction") {
    CHECK(extract_netloc("https://dld.bz/abc?x=1").netloc == "dld.bz");
    CHECK(extract_netloc("http://savingzev.feedsted.us/p").netloc == "savingzev.feedsted.us");
    CHECK_THROWS_AS(extract_netloc("not a url"), MalformedUrl);
    CHECK_THROWS_AS(extract_netloc(""), MalformedUrl);
    CHECK_THROWS_AS(extract_netloc("http://"), MalformedUrl);

    Url u = extract_netloc("HTTPS://DLD.BZ/Path?Q=1#Frag");
    CHECK(u.scheme == "https");
    CHECK(u.netloc == "dld.bz");
    CHECK(u.path == "/Path");
    CHECK(u.query == "Q=1");
    CHECK(u.fragment == "Frag");

    // scheme defaults to http when absent
    Url bare = extract_netloc("dld.bz/abc");
    CHECK(bare.scheme == "http");
    CHECK(bare.netloc == "dld.bz");
    CHECK_FALSE(bare.had_scheme);

    // ports stay inside the netloc
    Url port = extract_netloc("http://127.0.0.1:8080/x");
    CHECK(port.netloc == "127.0.0.1:8080");
    CHECK(port.host() == "127.0.0.1");

    // userinfo is dropped
    CHECK(extract_netloc("http://user:pw@example.com/a").netloc == "example.com");
}

TEST_CASE("netloc is case-invariant in the host") {
    std::mt19937_64 rng(11);
    const std::string base = "http://Sub.Example.COM/Path?q=1";
    Url ref = extract_netloc(base);
    for (int i = 0; i < 200; ++i) {
        std::string flipped = base;
        for (char& c : flipped) {
            if (std::isalpha(static_cast<unsigned char>(c)) && rng() % 2)
                c = static_cast<char>(std::isupper(static_cast<unsigned char>(c))
                                          ? std::tolower(c)
                                          : std::toupper(c));
        }
        auto u = try_extract_netloc(flipped);
        REQUIRE(u);
        CHECK(u->netloc == ref.netloc);
    }
}

TEST_CASE("url reassembly mirrors the input") {
    for (const std::string raw :
         {"https://dld.bz/abc?x=1", "http://a.b.c/d/e?f=g#h", "dld.bz/abc", "example.com",
          "http://example.com:8080/p?q#f"}) {
        Url u = extract_netloc(raw);
        std::string rebuilt = u.to_string();
        // equality up to case of scheme and netloc: inputs here are lowercase
        CHECK(rebuilt == raw);
    }
    CHECK(extract_netloc("HTTP://EXAMPLE.COM/Zz").to_string() == "http://example.com/Zz");
}

TEST_CASE("reference resolution for redirect locations") {
    Url base = extract_netloc("http://a.example/dir/page");
    CHECK(resolve_reference(base, "http://b.example/x").netloc == "b.example");
    CHECK(resolve_reference(base, "/rooted").full() == "http://a.example/rooted");
    CHECK(resolve_reference(base, "sibling").full() == "http://a.example/dir/sibling");
    CHECK(resolve_reference(base, "//c.example/y").full() == "http://c.example/y");
}

TEST_CASE("text canonicalization") {
    CHECK(canonicalize_text("Buy  now  http://t.co/x") == "Buy now http://t.co/x");
    CHECK(canonicalize_text("") == "");
    CHECK(canonicalize_text("A B") == "A B");      // NBSP folds to space
    CHECK(canonicalize_text("  lead and trail \t\n") == "lead and trail");
    CHECK(canonicalize_text("tab\tand\nnewline") == "tab and newline");
    CHECK(canonicalize_text("wide　space") == "wide space");
    CHECK(canonicalize_text(" em ") == "em");
}

TEST_CASE("canonicalization is idempotent") {
    std::mt19937_64 rng(3);
    const std::vector<std::string> pieces = {" ",  "\t", " ", " ", "x",
                                             "Ω",  "漢", "http://t.co/x", "\n", "a b",
                                             "\r\n", " "};
    for (int trial = 0; trial < 500; ++trial) {
        std::string s;
        int n = static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
        std::string once = canonicalize_text(s);
        CHECK(canonicalize_text(once) == once);
    }
}

TEST_CASE("url stripping variant") {
    CHECK(canonicalize_text_without_urls("Buy now http://t.co/x today") == "Buy now today");
    CHECK(canonicalize_text_without_urls("https://a.example/x") == "");
    CHECK(canonicalize_text_without_urls("no links here") == "no links here");
}

TEST_CASE("tweet wire format round trip") {
    const std::string line =
        R"({"id":"t1","created_at":"2017-02-25T10:30:00Z","text":"hello http://dld.bz/x",)"
        R"("user":{"id":"a1","screen_name":"alice","statuses_count":120,"friends_count":50,)"
        R"("followers_count":30,"lang":"en","created_at":"2015-01-01T00:00:00Z"},)"
        R"("urls":["http://dld.bz/x"]})";
    auto t = parse_tweet_json(line);
    REQUIRE(t);
    CHECK(t->tweet_id == "t1");
    CHECK(t->author == "a1");
    CHECK(t->created_at == *parse_timestamp("2017-02-25T10:30:00Z"));
    CHECK(t->embedded_urls == std::vector<std::string>{"http://dld.bz/x"});
    CHECK(t->user.statuses_count == 120);

    auto again = parse_tweet_json(tweet_to_json(*t));
    REQUIRE(again);
    CHECK(again->tweet_id == t->tweet_id);
    CHECK(again->created_at == t->created_at);
    CHECK(again->user.screen_name == t->user.screen_name);

    // numeric ids and epoch timestamps are accepted
    auto numeric = parse_tweet_json(
        R"({"id":99,"created_at":1488000000,"text":"x","user":{"id":7},"urls":[]})");
    REQUIRE(numeric);
    CHECK(numeric->tweet_id == "99");
    CHECK(numeric->author == "7");

    CHECK_FALSE(parse_tweet_json("not json"));
    CHECK_FALSE(parse_tweet_json(R"({"id":"t","text":"missing fields"})"));
    // negative counts violate the account invariant
    CHECK_FALSE(parse_tweet_json(
        R"({"id":"t","created_at":0,"text":"x","user":{"id":"a","statuses_count":-1}})"));
}

TEST_CASE("timestamps") {
    CHECK(*parse_timestamp("2017-09-01T00:00:00Z") == 1504224000);
    CHECK(*parse_timestamp("2017-09-01") == 1504224000);
    CHECK(format_timestamp(1504224000) == "2017-09-01T00:00:00Z");
    CHECK(format_date(1504224000 + 3600) == "2017-09-01");
    CHECK_FALSE(parse_timestamp("yesterday"));
    CHECK_FALSE(parse_date("2017/09/01"));
    CHECK(*parse_timestamp("2017-09-01T12:34:56.789Z") == *parse_timestamp("2017-09-01T12:34:56Z"));
}

TEST_CASE("duplicate equality is byte equality of canonical texts") {
    CHECK(canonicalize_text("same  text") == canonicalize_text("same text"));
    CHECK(canonicalize_text("same text") != canonicalize_text("Same text"));
}
