#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "spamwatch/core.hpp"

namespace spamwatch {

struct Trigger {
    std::string netloc;
    std::int64_t count_at_trigger = 0;
    Timestamp fired_at = 0;
};

// Windowed exact counter over netlocs. Counts reset every window_minutes;
// a non-whitelisted netloc fires at most one trigger per window, the first
// time it sits in the top k.
class TrendWindow {
public:
    TrendWindow(int top_k, int window_minutes, std::set<std::string> whitelist,
                Timestamp started_at = 0);

    // Counts every embedded URL's netloc of `tweet` (malformed URLs are
    // ignored) and returns the triggers this tweet caused. Resets first if
    // `now` falls past the window boundary.
    std::vector<Trigger> observe(const Tweet& tweet, Timestamp now);

    // The k highest-count netlocs ordered by (count desc, netloc asc).
    std::vector<std::pair<std::string, std::int64_t>> top_k_snapshot() const;

    bool is_whitelisted(const std::string& netloc) const;
    const std::map<std::string, std::int64_t>& counts() const { return counts_; }
    Timestamp window_started_at() const { return window_started_at_; }
    int top_k() const { return top_k_; }
    int window_minutes() const { return window_minutes_; }

private:
    void reset(Timestamp now);
    bool in_top_k(const std::string& netloc) const;

    int top_k_;
    int window_minutes_;
    std::set<std::string> whitelist_;
    Timestamp window_started_at_;
    std::map<std::string, std::int64_t> counts_;
    std::set<std::string> triggered_;  // per-window dedup
};

// One netloc per line, '#' starts a comment. Missing file throws
// SourceUnavailable-compatible runtime_error from the caller's viewpoint.
std::set<std::string> load_whitelist(const std::string& path);
std::set<std::string> parse_whitelist(const std::string& content);

}  // namespace spamwatch
