#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "spamwatch/core.hpp"

namespace spamwatch {

struct DetectionParams {
    int min_duplicate_factor = 3;   // fewest distinct accounts sharing a text
                                    // for it to enter the frequent set
    double overlap_ratio = 0.6;     // fraction of a timeline inside the
                                    // frequent set that flags the account
    std::size_t min_group_size = 20;
    std::size_t timeline_depth = 200;
    bool strip_urls_before_hash = false;

    std::string canonical(const std::string& text) const {
        return strip_urls_before_hash ? canonicalize_text_without_urls(text)
                                      : canonicalize_text(text);
    }
};

// Accounts that tweeted the same canonical text within one collected batch.
struct CandidateGroup {
    std::string seed_text;
    std::set<AccountId> accounts;
    std::size_t size() const { return accounts.size(); }
};

// Serves an account's most recent tweets, up to `depth`, as of some instant.
// Implementations: archive replay over a recorded stream (below), synthetic
// providers in tests. No live-platform implementation ships.
class TimelineProvider {
public:
    virtual ~TimelineProvider() = default;
    // nullopt = account unavailable. Timelines are never empty.
    virtual std::optional<Timeline> timeline(const AccountId& account, std::size_t depth) = 0;
};

// Replays timelines out of an in-memory tweet archive; only tweets with
// created_at <= as_of are visible.
class ArchiveTimelineProvider : public TimelineProvider {
public:
    ArchiveTimelineProvider(const std::vector<Tweet>& archive, const DetectionParams& params);
    void set_as_of(Timestamp as_of) { as_of_ = as_of; }
    std::optional<Timeline> timeline(const AccountId& account, std::size_t depth) override;

private:
    std::map<AccountId, std::vector<const Tweet*>> by_account_;  // ascending time;
                                                                 // archive must outlive this
    DetectionParams params_;
    Timestamp as_of_ = std::numeric_limits<Timestamp>::max();
};

// Partitions a batch by canonical text and keeps groups with at least
// min_group_size distinct authors; an account repeating a text counts once.
// Deterministic order: size desc, then seed_text asc.
std::vector<CandidateGroup> group_by_duplicate(const std::vector<Tweet>& tweets,
                                               std::size_t min_group_size,
                                               const DetectionParams& params);

struct FetchedTimelines {
    std::map<AccountId, Timeline> timelines;
    std::vector<AccountId> unavailable;
};

// Pulls each member's timeline; unavailable accounts are excluded and
// reported. Callers drop the group when fewer than min_group_size remain.
FetchedTimelines fetch_timelines(const CandidateGroup& group, TimelineProvider& provider,
                                 std::size_t depth);

struct DetectionResult {
    std::set<std::string> frequent_texts;  // texts shared by >= the minimum
                                           // duplicate factor of accounts
    std::set<AccountId> bots;              // accounts whose timeline overlap
                                           // with frequent_texts >= the ratio
};

// The clustering step: builds the frequent tweet set over the group's
// timelines, then flags every account whose timeline lies inside it by at
// least the overlap ratio. Both comparisons are >=. Pure function.
DetectionResult detect_botnet(const std::map<AccountId, Timeline>& timelines,
                              const DetectionParams& params);

struct NoUrls : std::runtime_error {
    NoUrls() : std::runtime_error("no embedded urls in any timeline") {}
};

// Most frequent full URL string across the given timelines' tweets; ties
// break to the lexicographically smallest. Throws NoUrls.
std::string dominant_embedded_url(const std::map<AccountId, Timeline>& timelines);

// 100 * |tweets authored by bots| / |tweets|.
double bot_traffic_fraction(const std::vector<Tweet>& tweets, const std::set<AccountId>& bots);

// ---------------------------------------------------------------------------
// batch pipeline

struct BatchDetection {
    std::vector<BotGroup> groups;
    std::set<AccountId> bots;       // union over groups
    std::size_t candidate_groups = 0;
    std::size_t dropped_below_threshold = 0;
};

// Full per-batch run: duplicate filter -> member-set dedup -> timeline
// fetch -> clustering -> dominant URL. Groups whose bot set is empty are
// discarded. group_id is a content hash of (keyword, bot set), so the same
// botnet re-detected later keeps its id. `workers` > 1 runs the clustering
// step in parallel; output is order-independent.
BatchDetection detect_batch(const std::vector<Tweet>& batch, const std::string& keyword,
                            TimelineProvider& provider, const DetectionParams& params,
                            Timestamp detected_at, unsigned workers = 1);

}  // namespace spamwatch
