#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace spamwatch {

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

using AccountId = std::string;

// Parses "YYYY-MM-DDTHH:MM:SS[.sss]Z" (also accepts "+00:00" and a bare
// "YYYY-MM-DD"). Returns nullopt on anything else.
std::optional<Timestamp> parse_timestamp(const std::string& s);
std::string format_timestamp(Timestamp t);   // ISO-8601, Z suffix
std::string format_date(Timestamp t);        // "YYYY-MM-DD"
std::optional<Timestamp> parse_date(const std::string& s);

constexpr std::int64_t kSecondsPerDay = 86400;

struct MalformedUrl : std::runtime_error {
    explicit MalformedUrl(const std::string& raw)
        : std::runtime_error("malformed url: " + raw) {}
};

// Decomposed URL: scheme://netloc/path?query#fragment. netloc is the
// lowercased host[:port] with all subdomain labels; comparisons anywhere in
// the pipeline are exact string equality on the full netloc.
struct Url {
    std::string raw;
    std::string scheme;    // lowercase; "http" when the input had none
    std::string netloc;    // lowercase host[:port]
    std::string path;      // "" or starts with '/'
    std::string query;     // without '?'
    std::string fragment;  // without '#'
    bool had_scheme = true;

    // Host without the port.
    std::string host() const;
    // scheme + "://" + netloc + "/", the bare-host navigation form.
    std::string netloc_only() const;
    // Full normalized form, always with scheme.
    std::string full() const;
    // Reassembly that mirrors the input shape (scheme kept only if present
    // in raw); equals raw up to case of scheme and netloc.
    std::string to_string() const;

    bool operator==(const Url& o) const { return full() == o.full(); }
};

// Decomposes a URL string. The netloc keeps every subdomain label; scheme
// defaults to "http" when absent. Throws MalformedUrl when no parseable
// host exists.
Url extract_netloc(const std::string& raw);

// Non-throwing variant used on untrusted embedded URLs.
std::optional<Url> try_extract_netloc(const std::string& raw);

// Resolves a possibly-relative reference against a base URL (enough of
// RFC 3986 for redirect Location handling).
Url resolve_reference(const Url& base, const std::string& reference);

// Canonical text form used for duplicate detection: every Unicode
// White_Space code point becomes ' ', runs collapse to one space, ends are
// trimmed. All other code points are kept verbatim, so two tweets are
// duplicates iff their canonical forms are byte-identical. Idempotent.
std::string canonicalize_text(const std::string& text);

// canonicalize_text with whitespace-delimited http(s):// tokens removed
// first. Off by default in every pipeline config.
std::string canonicalize_text_without_urls(const std::string& text);

struct Account {
    AccountId account_id;
    std::string screen_name;
    std::int64_t statuses_count = 0;
    std::int64_t friends_count = 0;
    std::int64_t followers_count = 0;
    std::string lang;
    Timestamp created_at = 0;
};

struct Tweet {
    std::string tweet_id;
    AccountId author;
    std::string text;
    Timestamp created_at = 0;
    std::vector<std::string> embedded_urls;
    Account user;  // full profile as carried on the wire
};

// One JSON object per line:
// {id, created_at, text, user:{id, screen_name, statuses_count,
//  friends_count, followers_count, lang, created_at}, urls:[...]}
// ids may arrive as numbers or strings; timestamps as epoch seconds or
// ISO-8601.
std::optional<Tweet> parse_tweet_json(const std::string& line);
std::string tweet_to_json(const Tweet& t);

// Most recent tweets of one account, deduplicated to canonical texts.
// |texts| is the timeline size used as the overlap-ratio denominator.
struct Timeline {
    AccountId account;
    std::vector<Tweet> tweets;       // most recent first, capped
    std::set<std::string> texts;     // canonical, distinct
};

// A detected botnet: the bot set together with the frequent tweet set that
// produced it.
struct BotGroup {
    std::string group_id;
    std::string trigger_keyword;
    std::set<AccountId> members;           // flagged bot accounts
    std::size_t candidate_size = 0;        // group size before flagging
    std::set<std::string> frequent_tweets; // canonical texts
    std::string dominant_url;              // "" when the group tweeted none
    std::set<std::string> embedded_urls;   // every URL in the bots' timelines
    Timestamp detected_at = 0;
    int min_duplicate_factor_used = 0;     // reported as "alpha"
    double overlap_ratio_used = 0.0;       // reported as "beta"
    std::vector<Account> member_profiles;  // profiles of `members`
};

// Stable content hash (FNV-1a 64) used for group ids and anywhere a
// deterministic digest is needed.
std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

}  // namespace spamwatch
