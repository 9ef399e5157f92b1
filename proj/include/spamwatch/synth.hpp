#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "spamwatch/campaign.hpp"
#include "spamwatch/core.hpp"
#include "spamwatch/detector.hpp"
#include "spamwatch/resolver.hpp"

namespace spamwatch {

// One planted botnet. mechanism:
//   traditional  batch-registered accounts, tightly clustered profiles,
//                creation times inside a narrow window, shared spam texts
//   hijacked     co-opted accounts, wide profile spread, creation times
//                stretched over years, legit tweets mixed with injected spam
//   paired       traditional profiles where members share one seed text and
//                each account pair shares its own filler texts; exists for
//                the parameter-sweep fixture
struct BotnetSpec {
    std::string mechanism = "traditional";
    std::size_t size = 20;
    std::size_t tweets_per_account = 1;   // spam posts per member per day
    std::size_t duplicate_texts = 12;     // distinct shared spam texts
    std::string shortener = "dld.bz";
    std::string landing_domain = "landing.example";
    std::string landing_subdomain;        // "" = none
    std::string archetype = "phishing";   // safe | phishing | secret | chain:N
    std::string registrant_email;
    // traditional/paired: member-unique filler texts (no URL)
    std::size_t unique_filler_per_account = 0;
    // hijacked: member-unique legit texts; when legit_texts_max > the base
    // value, members alternate between the two (overlap-ratio straddling)
    std::size_t legit_texts_per_account = 5;
    std::size_t legit_texts_max = 0;
    std::size_t mention_variants = 2;     // friend-tagging spam variants
};

struct RegistrantSpec {
    std::string email;
    std::string name;
    std::vector<std::string> extra_domains;  // registered but never landed on
};

struct ScenarioSpec {
    std::uint64_t seed = 1;
    std::string name = "scenario";
    Timestamp start = 1504224000;  // 2017-09-01T00:00:00Z
    int duration_days = 14;
    std::size_t human_accounts = 0;
    double bot_traffic_share = 0.0;  // 0 = humans post a fixed daily volume
    std::size_t human_tweets_per_day = 1;
    std::vector<std::string> human_shorteners = {"bit.ly", "tinyurl.com"};
    std::string safe_site = "google.com";
    std::string spam_parent_domain = "best-offers-daily.example";
    std::vector<BotnetSpec> botnets;
    std::vector<RegistrantSpec> registrants;

    static ScenarioSpec from_json(const std::string& json_text);
    static ScenarioSpec load(const std::string& path);
    std::string to_json() const;
};

struct GroundTruth {
    std::map<std::string, std::set<AccountId>> bots_by_botnet;  // bn0, bn1, ...
    std::set<AccountId> all_bots;
    struct Daily {
        std::string date;
        std::string keyword;
        std::int64_t bot_tweets = 0;
        std::int64_t total_tweets = 0;
    };
    std::vector<Daily> daily;  // sorted by (date, keyword)
    double share_target = 0.0;

    std::string to_json() const;
    static GroundTruth from_json(const std::string& json_text);
    static GroundTruth load(const std::string& path);
};

struct SyntheticWorld {
    std::vector<Account> accounts;
    std::vector<Tweet> stream;  // non-decreasing created_at
    WebSpec web;
    std::string registry_json;
    GroundTruth truth;
    std::vector<std::string> whitelist;
};

// Generators are deterministic: the same spec (seed included) reproduces
// byte-identical streams, webs and registries.
SyntheticWorld generate_world(const ScenarioSpec& spec);

std::pair<std::vector<Account>, std::vector<Tweet>> generate_traditional_botnet(
    const ScenarioSpec& scenario, const BotnetSpec& botnet, std::size_t index);
std::pair<std::vector<Account>, std::vector<Tweet>> generate_hijacked_botnet(
    const ScenarioSpec& scenario, const BotnetSpec& botnet, std::size_t index);

// Site map for every planted landing: safe static pages, 301 chains,
// client-side phishing redirects, and secret-URL splits (bare host safe,
// deep path spam).
WebSpec build_synthetic_web(const ScenarioSpec& spec);

// Built-in scenarios: default, fraction30, linkfarm, sweep, straddle.
ScenarioSpec preset_scenario(const std::string& name);
std::vector<std::string> preset_names();

// Writes stream.jsonl, web.json, registry.json, truth.json, whitelist.txt,
// scenario.json and a ready-to-run config.json into out_dir.
void write_world(const SyntheticWorld& world, const ScenarioSpec& spec,
                 const std::string& out_dir);

// ---------------------------------------------------------------------------
// evaluation

struct Evaluation {
    double precision = 1.0;
    double recall = 0.0;
    bool precision_no_support = false;  // no predictions: precision pinned to
                                        // 1.0 with zero support, flagged
    std::map<std::string, double> per_group_f1;  // planted botnet -> best F1
};

// Account-level scores of detected bot sets against planted membership.
Evaluation evaluate(const std::vector<BotGroup>& detected, const GroundTruth& truth);

// ---------------------------------------------------------------------------
// parameter sweep

struct SweepReport {
    struct Cell {
        int min_duplicate_factor;
        double overlap_ratio;
        std::size_t bot_count;
    };
    std::vector<Cell> table;  // sorted by (factor, ratio)

    int alpha_ref = 3;        // highlighted deployed parameters
    double beta_ref = 0.6;
    std::vector<std::pair<int, std::size_t>> alpha_axis;     // at beta_ref
    std::vector<std::pair<double, std::size_t>> beta_axis;   // at alpha_ref
    std::string alpha_largest_drop;  // "2->3"
    double beta_plateau_onset = 0.0;

    std::string to_csv() const;     // alpha,beta,bot_count
    std::string elbow_json() const;
};

// Runs the clustering at every (factor, ratio) over one collected batch;
// candidate groups and timelines are shared across cells, so counts are
// exactly monotone along both axes. The elbow report marks the largest
// marginal decrease on the factor axis and the plateau onset on the ratio
// axis (first grid point after which every decrease is within 5% of the
// axis range).
SweepReport sweep(const std::vector<Tweet>& batch, TimelineProvider& provider,
                  const std::vector<int>& factors, const std::vector<double>& ratios,
                  const DetectionParams& base, unsigned workers = 1);

}  // namespace spamwatch
