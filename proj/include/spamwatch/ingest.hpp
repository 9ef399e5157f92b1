#pragma once

#include <memory>
#include <string>
#include <vector>

#include "spamwatch/core.hpp"

namespace spamwatch {

struct SourceUnavailable : std::runtime_error {
    explicit SourceUnavailable(const std::string& what) : std::runtime_error(what) {}
};

// A keyword-filtered tweet stream. Sources emit tweets in non-decreasing
// created_at order; malformed lines are skipped and counted, never fatal.
class TweetStream {
public:
    virtual ~TweetStream() = default;
    virtual std::optional<Tweet> next() = 0;
    virtual std::size_t parse_errors() const = 0;
};

// Opens a stream and filters it to tweets whose text contains `keyword`
// (case-insensitive substring; empty keyword passes everything).
//
// uri forms:
//   path or file:path   line-delimited JSON replay
//   tcp://host:port     the same JSON lines over a TCP connection
// Throws SourceUnavailable when the file or connection cannot be opened.
std::unique_ptr<TweetStream> open_stream(const std::string& uri, const std::string& keyword);

// In-memory source over an already-materialized tweet list (generator kind).
std::unique_ptr<TweetStream> open_vector_stream(std::vector<Tweet> tweets,
                                                const std::string& keyword);

// First n matching tweets, or all available if the source ends early.
std::vector<Tweet> collect_n(TweetStream& stream, std::size_t n);

// Case-insensitive substring check shared by stream filtering and job
// collection.
bool contains_keyword(const std::string& text, const std::string& keyword);

}  // namespace spamwatch
