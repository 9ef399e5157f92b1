#include "spamwatch/detector.hpp"

#include <algorithm>
#include <limits>

#include "spamwatch/workers.hpp"

namespace spamwatch {

ArchiveTimelineProvider::ArchiveTimelineProvider(const std::vector<Tweet>& archive,
                                                 const DetectionParams& params)
    : params_(params) {
    for (const Tweet& t : archive) by_account_[t.author].push_back(&t);
    for (auto& [id, tweets] : by_account_)
        std::stable_sort(tweets.begin(), tweets.end(),
                         [](const Tweet* a, const Tweet* b) { return a->created_at < b->created_at; });
}

std::optional<Timeline> ArchiveTimelineProvider::timeline(const AccountId& account,
                                                          std::size_t depth) {
    auto it = by_account_.find(account);
    if (it == by_account_.end()) return std::nullopt;
    Timeline tl;
    tl.account = account;
    const auto& all = it->second;
    for (auto rit = all.rbegin(); rit != all.rend() && tl.tweets.size() < depth; ++rit) {
        if ((*rit)->created_at > as_of_) continue;
        tl.tweets.push_back(**rit);
    }
    if (tl.tweets.empty()) return std::nullopt;
    for (const Tweet& t : tl.tweets) tl.texts.insert(params_.canonical(t.text));
    return tl;
}

std::vector<CandidateGroup> group_by_duplicate(const std::vector<Tweet>& tweets,
                                               std::size_t min_group_size,
                                               const DetectionParams& params) {
    std::map<std::string, std::set<AccountId>> by_text;
    for (const Tweet& t : tweets) by_text[params.canonical(t.text)].insert(t.author);

    std::vector<CandidateGroup> groups;
    for (auto& [text, accounts] : by_text)
        if (accounts.size() >= min_group_size && !text.empty())
            groups.push_back(CandidateGroup{text, std::move(accounts)});

    std::sort(groups.begin(), groups.end(), [](const CandidateGroup& a, const CandidateGroup& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.seed_text < b.seed_text;
    });
    return groups;
}

FetchedTimelines fetch_timelines(const CandidateGroup& group, TimelineProvider& provider,
                                 std::size_t depth) {
    FetchedTimelines out;
    for (const AccountId& a : group.accounts) {
        auto tl = provider.timeline(a, depth);
        if (tl)
            out.timelines.emplace(a, std::move(*tl));
        else
            out.unavailable.push_back(a);
    }
    return out;
}

DetectionResult detect_botnet(const std::map<AccountId, Timeline>& timelines,
                              const DetectionParams& params) {
    DetectionResult result;

    std::map<std::string, int> account_count;  // distinct accounts per text
    for (const auto& [id, tl] : timelines)
        for (const std::string& text : tl.texts) ++account_count[text];
    for (const auto& [text, n] : account_count)
        if (n >= params.min_duplicate_factor) result.frequent_texts.insert(text);

    for (const auto& [id, tl] : timelines) {
        if (tl.texts.empty()) continue;
        std::size_t overlap = 0;
        for (const std::string& text : tl.texts)
            if (result.frequent_texts.count(text)) ++overlap;
        double ratio = static_cast<double>(overlap) / static_cast<double>(tl.texts.size());
        if (ratio >= params.overlap_ratio) result.bots.insert(id);
    }
    return result;
}

std::string dominant_embedded_url(const std::map<AccountId, Timeline>& timelines) {
    std::map<std::string, std::int64_t> counts;
    for (const auto& [id, tl] : timelines)
        for (const Tweet& t : tl.tweets)
            for (const std::string& u : t.embedded_urls) ++counts[u];
    if (counts.empty()) throw NoUrls();
    // counts is key-sorted, so the first maximum is the lexicographic winner
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it)
        if (it->second > best->second) best = it;
    return best->first;
}

double bot_traffic_fraction(const std::vector<Tweet>& tweets, const std::set<AccountId>& bots) {
    if (tweets.empty()) return 0.0;
    std::size_t from_bots = 0;
    for (const Tweet& t : tweets)
        if (bots.count(t.author)) ++from_bots;
    return 100.0 * static_cast<double>(from_bots) / static_cast<double>(tweets.size());
}

BatchDetection detect_batch(const std::vector<Tweet>& batch, const std::string& keyword,
                            TimelineProvider& provider, const DetectionParams& params,
                            Timestamp detected_at, unsigned workers) {
    BatchDetection out;
    auto groups = group_by_duplicate(batch, params.min_group_size, params);
    out.candidate_groups = groups.size();

    // Several duplicate texts from one botnet produce identical member sets;
    // keep the first (largest, then lexicographic) per member set.
    std::set<std::set<AccountId>> seen;
    std::vector<CandidateGroup> unique_groups;
    for (auto& g : groups)
        if (seen.insert(g.accounts).second) unique_groups.push_back(std::move(g));

    std::map<AccountId, Account> profiles;
    for (const Tweet& t : batch) profiles.emplace(t.author, t.user);

    auto detected = parallel_map<std::optional<BotGroup>>(
        unique_groups.size(),
        [&](std::size_t i) -> std::optional<BotGroup> {
            const CandidateGroup& g = unique_groups[i];
            FetchedTimelines fetched = fetch_timelines(g, provider, params.timeline_depth);
            if (fetched.timelines.size() < params.min_group_size) return std::nullopt;
            DetectionResult r = detect_botnet(fetched.timelines, params);
            if (r.bots.empty()) return std::nullopt;

            BotGroup bg;
            bg.trigger_keyword = keyword;
            bg.members = r.bots;
            bg.candidate_size = fetched.timelines.size();
            bg.frequent_tweets = std::move(r.frequent_texts);
            bg.detected_at = detected_at;
            bg.min_duplicate_factor_used = params.min_duplicate_factor;
            bg.overlap_ratio_used = params.overlap_ratio;

            std::map<AccountId, Timeline> bot_timelines;
            for (const AccountId& a : bg.members) {
                auto it = fetched.timelines.find(a);
                if (it != fetched.timelines.end()) bot_timelines.emplace(a, it->second);
            }
            try {
                bg.dominant_url = dominant_embedded_url(bot_timelines);
            } catch (const NoUrls&) {
                bg.dominant_url.clear();
            }
            for (const auto& [a, tl] : bot_timelines)
                for (const Tweet& t : tl.tweets)
                    bg.embedded_urls.insert(t.embedded_urls.begin(), t.embedded_urls.end());

            std::string key = keyword;
            for (const AccountId& a : bg.members) key += "\x1f" + a;
            bg.group_id = hex64(fnv1a64(key));
            for (const AccountId& a : bg.members) {
                auto p = profiles.find(a);
                if (p != profiles.end()) bg.member_profiles.push_back(p->second);
            }
            return bg;
        },
        workers);

    std::set<std::string> group_ids;
    for (auto& g : detected) {
        if (!g) {
            ++out.dropped_below_threshold;
            continue;
        }
        if (!group_ids.insert(g->group_id).second) continue;  // same bot set via another seed
        out.bots.insert(g->members.begin(), g->members.end());
        out.groups.push_back(std::move(*g));
    }
    std::sort(out.groups.begin(), out.groups.end(),
              [](const BotGroup& a, const BotGroup& b) { return a.group_id < b.group_id; });
    return out;
}

}  // namespace spamwatch
