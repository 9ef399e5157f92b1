#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "spamwatch/core.hpp"
#include "spamwatch/ingest.hpp"

using namespace spamwatch;
namespace fs = std::filesystem;

namespace {

std::string tweet_line(const std::string& id, const std::string& author, const std::string& text,
                       Timestamp at = 0) {
    Tweet t;
    t.tweet_id = id;
    t.author = author;
    t.user.account_id = author;
    t.text = text;
    t.created_at = at;
    return tweet_to_json(t);
}

fs::path write_temp(const std::string& name, const std::string& content) {
    fs::path p = fs::temp_directory_path() / ("spamwatch_ingest_" + name);
    std::ofstream out(p);
    out << content;
    return p;
}

}  // namespace

TEST_CASE("keyword filter over a file") {
    std::string data = tweet_line("1", "a", "check http://x.co/1") + "\n" +
                       tweet_line("2", "b", "no links today") + "\n" +
                       tweet_line("3", "c", "more HTTP://Y.co stuff") + "\n";
    auto path = write_temp("filter.jsonl", data);
    auto stream = open_stream(path.string(), "http");
    auto tweets = collect_n(*stream, 100);
    REQUIRE(tweets.size() == 2);  // case-insensitive substring
    CHECK(tweets[0].tweet_id == "1");
    CHECK(tweets[1].tweet_id == "3");
    for (const Tweet& t : tweets) CHECK(contains_keyword(t.text, "http"));
}

TEST_CASE("shortener keyword matches only its tweets") {
    std::string data = tweet_line("1", "a", "go http://dld.bz/q") + "\n" +
                       tweet_line("2", "b", "go http://bit.ly/q") + "\n";
    auto path = write_temp("shortener.jsonl", data);
    auto stream = open_stream(path.string(), "dld.bz");
    auto tweets = collect_n(*stream, 100);
    REQUIRE(tweets.size() == 1);
    CHECK(tweets[0].tweet_id == "1");
}

TEST_CASE("malformed lines are skipped and counted") {
    std::string data;
    for (int i = 0; i < 100; ++i) {
        if (i == 50)
            data += "{broken json\n";
        else
            data += tweet_line(std::to_string(i), "a", "http tweet " + std::to_string(i)) + "\n";
    }
    auto path = write_temp("malformed.jsonl", data);
    auto stream = open_stream(path.string(), "http");
    auto tweets = collect_n(*stream, 1000);
    CHECK(tweets.size() == 99);
    CHECK(stream->parse_errors() == 1);
}

TEST_CASE("collect_n stops at n or at exhaustion") {
    std::string data;
    for (int i = 0; i < 5; ++i)
        data += tweet_line(std::to_string(i), "a", "http x" + std::to_string(i)) + "\n";
    auto path = write_temp("exhaust.jsonl", data);

    auto s1 = open_stream(path.string(), "http");
    CHECK(collect_n(*s1, 10).size() == 5);
    auto s2 = open_stream(path.string(), "http");
    CHECK(collect_n(*s2, 3).size() == 3);
}

TEST_CASE("replay determinism") {
    std::string data;
    for (int i = 0; i < 50; ++i)
        data += tweet_line(std::to_string(i), "a" + std::to_string(i % 7),
                           "http msg " + std::to_string(i), i) +
                "\n";
    auto path = write_temp("determinism.jsonl", data);
    auto run = [&] {
        auto s = open_stream(path.string(), "http");
        std::string ids;
        for (const Tweet& t : collect_n(*s, 1000)) ids += t.tweet_id + ",";
        return ids;
    };
    CHECK(run() == run());
}

TEST_CASE("missing source throws SourceUnavailable") {
    CHECK_THROWS_AS(open_stream("/nonexistent/never.jsonl", "http"), SourceUnavailable);
    CHECK_THROWS_AS(open_stream("tcp://127.0.0.1:1", "http"), SourceUnavailable);
}

TEST_CASE("socket source speaks the same json lines") {
    int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(listener >= 0);
    int yes = 1;
    ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    REQUIRE(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
    REQUIRE(::listen(listener, 1) == 0);
    socklen_t len = sizeof(addr);
    REQUIRE(::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len) == 0);
    int port = ntohs(addr.sin_port);

    std::thread server([&] {
        int conn = ::accept(listener, nullptr, nullptr);
        if (conn < 0) return;
        std::string payload = tweet_line("s1", "a", "http from socket") + "\n" +
                              "garbage line\n" + tweet_line("s2", "b", "http too") + "\n";
        ::send(conn, payload.data(), payload.size(), 0);
        ::close(conn);
    });

    auto stream = open_stream("tcp://127.0.0.1:" + std::to_string(port), "http");
    auto tweets = collect_n(*stream, 10);
    server.join();
    ::close(listener);

    REQUIRE(tweets.size() == 2);
    CHECK(tweets[0].tweet_id == "s1");
    CHECK(tweets[1].tweet_id == "s2");
    CHECK(stream->parse_errors() == 1);
}

TEST_CASE("vector stream filters too") {
    std::vector<Tweet> tweets;
    Tweet t;
    t.tweet_id = "1";
    t.text = "hello http://a.b/c";
    tweets.push_back(t);
    t.tweet_id = "2";
    t.text = "plain";
    tweets.push_back(t);
    auto s = open_vector_stream(tweets, "http");
    CHECK(collect_n(*s, 10).size() == 1);
}
