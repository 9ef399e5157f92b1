#include "spamwatch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spamwatch/ingest.hpp"

namespace spamwatch {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// deterministic rng
//
// std::*_distribution algorithms are implementation-defined; draws here are
// derived from raw mt19937_64 output so identical seeds give identical
// worlds on any standard library.

namespace {

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    std::uint64_t next() { return eng(); }
    double uniform01() { return std::ldexp(static_cast<double>(next() >> 11), -53); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {  // inclusive
        return lo + static_cast<std::int64_t>(next() %
                                              static_cast<std::uint64_t>(hi - lo + 1));
    }
    double normal(double mean, double sigma) {
        double u1 = std::max(uniform01(), 1e-12);
        double u2 = uniform01();
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) *
                          std::cos(2.0 * 3.14159265358979323846 * u2);
    }
};

std::uint64_t sub_seed(const ScenarioSpec& s, const std::string& tag) {
    return fnv1a64(std::to_string(s.seed) + ":" + s.name + ":" + tag);
}

std::string pad(std::size_t n, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%0*zu", width, n);
    return buf;
}

const std::vector<std::string>& spam_templates() {
    static const std::vector<std::string> t = {
        "You will not believe what happened next",
        "Breaking deal ends tonight, act fast",
        "This trick doubled my followers overnight",
        "Watch before it gets taken down",
        "Exclusive offer for my followers only",
        "The video they tried to hide from you",
        "I made 500 a day working from home",
        "Shocking footage just leaked",
        "Limited stock, claim yours now",
        "Why is nobody talking about this",
        "Top secret method revealed today",
        "Best giveaway of the year, join now",
    };
    return t;
}

const std::vector<std::string>& human_templates() {
    static const std::vector<std::string> t = {
        "Good read this morning", "Sharing with the team", "Worth your time",
        "Interesting take on this", "Finally finished this one", "Thoughts?",
        "Saving this for later", "Great thread on the topic", "As promised",
        "Could not agree more", "Old but gold", "New post is up",
    };
    return t;
}

const std::vector<std::string>& legit_templates() {
    static const std::vector<std::string> t = {
        "Lovely weather out here today", "Coffee first, everything else later",
        "Weekend plans loading", "That meeting could have been an email",
        "Dinner was amazing tonight", "Traffic is unreal this morning",
        "Happy birthday to my best friend", "Back at the gym finally",
    };
    return t;
}

std::string gen_screen_name(Rng& rng) {
    static const char* syl[] = {"ka", "ri", "mo", "ta", "le", "su", "no", "vi",
                                "ze", "da", "lu", "pe", "sha", "tor", "mi", "bel"};
    std::string name;
    int parts = 2 + static_cast<int>(rng.next() % 2);
    for (int i = 0; i < parts; ++i) name += syl[rng.next() % 16];
    name += std::to_string(rng.uniform_int(0, 99));
    return name;
}

std::string landing_host(const BotnetSpec& b) {
    return b.landing_subdomain.empty() ? b.landing_domain
                                       : b.landing_subdomain + "." + b.landing_domain;
}

std::string short_url(const BotnetSpec& b, std::size_t botnet_index, std::size_t text_index) {
    return "http://" + b.shortener + "/c" + std::to_string(botnet_index) + "x" +
           std::to_string(text_index);
}

std::string spam_text(const BotnetSpec& b, std::size_t botnet_index, std::size_t text_index) {
    const auto& t = spam_templates();
    return t[(botnet_index * 5 + text_index) % t.size()] + " " +
           short_url(b, botnet_index, text_index);
}

Tweet make_tweet(const Account& author, std::string id, std::string text, Timestamp at,
                 std::vector<std::string> urls) {
    Tweet t;
    t.tweet_id = std::move(id);
    t.author = author.account_id;
    t.user = author;
    t.text = std::move(text);
    t.created_at = at;
    t.embedded_urls = std::move(urls);
    return t;
}

int non_negative(double v) { return v < 0 ? 0 : static_cast<int>(std::llround(v)); }

}  // namespace

// ---------------------------------------------------------------------------
// botnet generators

std::pair<std::vector<Account>, std::vector<Tweet>> generate_traditional_botnet(
    const ScenarioSpec& scenario, const BotnetSpec& b, std::size_t index) {
    Rng rng(sub_seed(scenario, "bn" + std::to_string(index)));
    std::vector<Account> accounts;
    std::vector<Tweet> tweets;

    // batch registration: one narrow creation window, tightly clustered counts
    const double mean_statuses = rng.uniform(100, 400);
    const double mean_friends = rng.uniform(60, 500);
    const double mean_followers = rng.uniform(20, 250);
    const Timestamp batch_start =
        scenario.start - rng.uniform_int(30, 240) * kSecondsPerDay;
    const std::int64_t batch_window = 48 * 3600;
    const std::string stem = gen_screen_name(rng);

    for (std::size_t m = 0; m < b.size; ++m) {
        Account a;
        a.account_id = "b" + std::to_string(index) + "_" + pad(m, 4);
        a.screen_name = stem + "_" + pad(m, 3);
        a.statuses_count = non_negative(rng.normal(mean_statuses, 1.0 + mean_statuses * 0.02));
        a.friends_count = non_negative(rng.normal(mean_friends, 1.0 + mean_friends * 0.02));
        a.followers_count = non_negative(rng.normal(mean_followers, 1.0 + mean_followers * 0.02));
        a.lang = "en";
        a.created_at = batch_start + rng.uniform_int(0, batch_window - 1);
        accounts.push_back(std::move(a));
    }

    const std::size_t K = std::max<std::size_t>(1, b.duplicate_texts);
    const std::size_t tpa = std::max<std::size_t>(1, b.tweets_per_account);
    std::size_t seq = 0;
    auto next_id = [&] { return "t" + std::to_string(index) + "_" + pad(seq++, 5); };

    const bool paired = b.mechanism == "paired";
    const int D = std::max(1, scenario.duration_days);

    for (int d = 0; d < D; ++d) {
        Timestamp day = scenario.start + static_cast<Timestamp>(d) * kSecondsPerDay;
        for (const Account& a : accounts) {
            for (std::size_t p = 0; p < tpa; ++p) {
                std::size_t j = paired ? 0 : (static_cast<std::size_t>(d) * tpa + p) % K;
                tweets.push_back(make_tweet(a, next_id(), spam_text(b, index, j),
                                            day + rng.uniform_int(0, kSecondsPerDay - 1),
                                            {short_url(b, index, j)}));
                if (paired) break;  // one shared seed text per member per day
            }
        }
    }

    if (paired) {
        // each account pair shares its own filler texts; no URLs
        const std::size_t per_pair = std::max<std::size_t>(1, b.unique_filler_per_account);
        for (std::size_t m = 0; m + 1 < accounts.size(); m += 2) {
            for (std::size_t x = 0; x < per_pair; ++x) {
                std::string text = legit_templates()[x % legit_templates().size()] + " pr" +
                                   std::to_string(index) + "p" + std::to_string(m / 2) + "n" +
                                   std::to_string(x);
                Timestamp at0 = scenario.start + rng.uniform_int(0, kSecondsPerDay - 1);
                Timestamp at1 = scenario.start + rng.uniform_int(0, kSecondsPerDay - 1);
                tweets.push_back(make_tweet(accounts[m], next_id(), text, at0, {}));
                tweets.push_back(make_tweet(accounts[m + 1], next_id(), text, at1, {}));
            }
        }
    } else if (b.unique_filler_per_account > 0) {
        // member-unique noise texts thin out the overlap ratio
        const std::size_t F = b.unique_filler_per_account;
        for (std::size_t m = 0; m < accounts.size(); ++m) {
            for (std::size_t u = 0; u < F; ++u) {
                int d = static_cast<int>(u * static_cast<std::size_t>(D) / F);
                std::string text = legit_templates()[u % legit_templates().size()] + " fx" +
                                   std::to_string(index) + "m" + std::to_string(m) + "n" +
                                   std::to_string(u);
                Timestamp at = scenario.start + static_cast<Timestamp>(d) * kSecondsPerDay +
                               rng.uniform_int(0, kSecondsPerDay - 1);
                tweets.push_back(make_tweet(accounts[m], next_id(), text, at, {}));
            }
        }
    }
    return {std::move(accounts), std::move(tweets)};
}

std::pair<std::vector<Account>, std::vector<Tweet>> generate_hijacked_botnet(
    const ScenarioSpec& scenario, const BotnetSpec& b, std::size_t index) {
    Rng rng(sub_seed(scenario, "bn" + std::to_string(index)));
    std::vector<Account> accounts;
    std::vector<Tweet> tweets;

    // co-opted accounts look like their owners: wide profile spread and
    // creation times stratified over years so the spread is structural
    static const char* langs[] = {"en", "es", "pt", "ar", "fr", "tr", "id"};
    const Timestamp lo = scenario.start - 9 * 365 * kSecondsPerDay;
    const Timestamp hi = scenario.start - 180 * kSecondsPerDay;
    const std::int64_t stride = (hi - lo) / static_cast<std::int64_t>(std::max<std::size_t>(b.size, 1));

    for (std::size_t m = 0; m < b.size; ++m) {
        Account a;
        a.account_id = "b" + std::to_string(index) + "_" + pad(m, 4);
        a.screen_name = gen_screen_name(rng);
        a.statuses_count = rng.uniform_int(50, 20000);
        a.friends_count = rng.uniform_int(20, 5000);
        a.followers_count = rng.uniform_int(0, 10000);
        a.lang = langs[m % 7];
        a.created_at = lo + static_cast<Timestamp>(m) * stride +
                       rng.uniform_int(0, std::max<std::int64_t>(stride / 4, 1));
        accounts.push_back(std::move(a));
    }

    const std::size_t K = std::max<std::size_t>(1, b.duplicate_texts);
    const int D = std::max(1, scenario.duration_days);
    std::size_t seq = 0;
    auto next_id = [&] { return "t" + std::to_string(index) + "_" + pad(seq++, 5); };

    // the controlling app posts the day's spam text from every account
    for (int d = 0; d < D; ++d) {
        Timestamp day = scenario.start + static_cast<Timestamp>(d) * kSecondsPerDay;
        std::size_t j = static_cast<std::size_t>(d) % K;
        for (const Account& a : accounts)
            tweets.push_back(make_tweet(a, next_id(), spam_text(b, index, j),
                                        day + rng.uniform_int(0, kSecondsPerDay - 1),
                                        {short_url(b, index, j)}));
    }

    // the owners' own tweets, unique per account, no URLs
    for (std::size_t m = 0; m < accounts.size(); ++m) {
        std::size_t legit = b.legit_texts_per_account;
        if (b.legit_texts_max > legit && m % 2 == 1) legit = b.legit_texts_max;
        for (std::size_t u = 0; u < legit; ++u) {
            int d = static_cast<int>(u * static_cast<std::size_t>(D) / std::max<std::size_t>(legit, 1));
            std::string text = legit_templates()[u % legit_templates().size()] + " n" +
                               std::to_string(index) + "m" + std::to_string(m) + "u" +
                               std::to_string(u);
            Timestamp at = scenario.start + static_cast<Timestamp>(d) * kSecondsPerDay +
                           rng.uniform_int(0, kSecondsPerDay - 1);
            tweets.push_back(make_tweet(accounts[m], next_id(), text, at, {}));
        }
        // friend tagging: spam variants mentioning another member
        for (std::size_t v = 0; v < b.mention_variants; ++v) {
            int d = static_cast<int>(v * static_cast<std::size_t>(D) /
                                     std::max<std::size_t>(b.mention_variants, 1));
            std::size_t j = v % K;
            const Account& friend_acc = accounts[(m + v + 1) % accounts.size()];
            std::string text = spam_text(b, index, j) + " @" + friend_acc.screen_name;
            Timestamp at = scenario.start + static_cast<Timestamp>(d) * kSecondsPerDay +
                           rng.uniform_int(0, kSecondsPerDay - 1);
            tweets.push_back(
                make_tweet(accounts[m], next_id(), text, at, {short_url(b, index, j)}));
        }
    }
    return {std::move(accounts), std::move(tweets)};
}

// ---------------------------------------------------------------------------
// synthetic web

WebSpec build_synthetic_web(const ScenarioSpec& spec) {
    WebSpec web;
    std::set<std::string> page_hosts;
    auto add_page_host = [&](const std::string& host, const std::string& content) {
        if (!page_hosts.insert(host).second) return;
        web.rules.push_back({host + "/*", WebRule::Kind::Page, content});
    };

    for (std::size_t i = 0; i < spec.botnets.size(); ++i) {
        const BotnetSpec& b = spec.botnets[i];
        const std::string host = landing_host(b);
        const std::string parent = "http://" + spec.spam_parent_domain + "/";
        const std::string safe = "http://" + spec.safe_site + "/";
        const std::size_t K = std::max<std::size_t>(1, b.duplicate_texts);

        if (b.archetype.rfind("chain:", 0) == 0) {
            // N consecutive 301 responses: the shortener plus N-1 hops, then a page
            int depth = std::max(1, std::atoi(b.archetype.c_str() + 6));
            for (std::size_t j = 0; j < K; ++j)
                web.rules.push_back({b.shortener + "/c" + std::to_string(i) + "x" + std::to_string(j),
                                     WebRule::Kind::ServerRedirect, "http://" + host + "/h1"});
            for (int k = 1; k < depth; ++k)
                web.rules.push_back({host + "/h" + std::to_string(k),
                                     WebRule::Kind::ServerRedirect,
                                     "http://" + host + "/h" + std::to_string(k + 1)});
            web.rules.push_back({host + "/h" + std::to_string(depth), WebRule::Kind::Page,
                                 "end of the line"});
            web.rules.push_back({host + "/", WebRule::Kind::Page, "landing home"});
            continue;
        }

        for (std::size_t j = 0; j < K; ++j)
            web.rules.push_back({b.shortener + "/c" + std::to_string(i) + "x" + std::to_string(j),
                                 WebRule::Kind::ServerRedirect,
                                 "http://" + host + "/p/" + std::to_string(i) + "x" +
                                     std::to_string(j)});

        if (b.archetype == "safe") {
            web.rules.push_back({host + "/p/*", WebRule::Kind::Page, "perfectly ordinary page"});
            web.rules.push_back({host + "/", WebRule::Kind::Page, "landing home"});
        } else if (b.archetype == "secret") {
            // bare host looks harmless, the deep path does not
            web.rules.push_back({host + "/", WebRule::Kind::ClientRedirect, safe});
            web.rules.push_back({host + "/p/*", WebRule::Kind::ClientRedirect, parent});
            add_page_host(spec.safe_site, "nothing to see here");
            add_page_host(spec.spam_parent_domain, "very real offers");
        } else {  // phishing
            web.rules.push_back({host + "/", WebRule::Kind::ClientRedirect, parent});
            web.rules.push_back({host + "/p/*", WebRule::Kind::ClientRedirect, parent});
            add_page_host(spec.spam_parent_domain, "very real offers");
        }
    }
    add_page_host("youtube.com", "videos");
    return web;
}

// ---------------------------------------------------------------------------
// world assembly

SyntheticWorld generate_world(const ScenarioSpec& spec) {
    SyntheticWorld world;
    std::vector<Tweet> all;
    std::set<std::string> bot_keywords;

    for (std::size_t i = 0; i < spec.botnets.size(); ++i) {
        const BotnetSpec& b = spec.botnets[i];
        auto [accounts, tweets] = b.mechanism == "hijacked"
                                      ? generate_hijacked_botnet(spec, b, i)
                                      : generate_traditional_botnet(spec, b, i);
        std::string name = "bn" + std::to_string(i);
        for (const Account& a : accounts) {
            world.truth.bots_by_botnet[name].insert(a.account_id);
            world.truth.all_bots.insert(a.account_id);
        }
        bot_keywords.insert(b.shortener);
        world.accounts.insert(world.accounts.end(), accounts.begin(), accounts.end());
        all.insert(all.end(), tweets.begin(), tweets.end());
    }

    // humans
    Rng rng(sub_seed(spec, "humans"));
    static const char* langs[] = {"en", "es", "pt", "de", "fr", "ja", "it"};
    std::vector<Account> humans;
    const Timestamp hlo = spec.start - 8 * 365 * kSecondsPerDay;
    const Timestamp hhi = spec.start - 30 * kSecondsPerDay;
    for (std::size_t i = 0; i < spec.human_accounts; ++i) {
        Account a;
        a.account_id = "h" + pad(i, 5);
        a.screen_name = gen_screen_name(rng);
        a.statuses_count = rng.uniform_int(10, 8000);
        a.friends_count = rng.uniform_int(5, 2000);
        a.followers_count = rng.uniform_int(0, 3000);
        a.lang = langs[i % 7];
        a.created_at = rng.uniform_int(hlo, hhi);
        humans.push_back(std::move(a));
    }
    world.accounts.insert(world.accounts.end(), humans.begin(), humans.end());

    const int D = std::max(1, spec.duration_days);
    std::size_t hseq = 0;
    auto human_id = [&] { return "th_" + pad(hseq++, 6); };

    if (spec.bot_traffic_share > 0.0 && !humans.empty()) {
        // per (day, keyword) quota pinned to the planted share
        std::map<std::pair<int, std::string>, std::int64_t> bot_count;
        for (const Tweet& t : all) {
            int d = static_cast<int>((t.created_at - spec.start) / kSecondsPerDay);
            for (const std::string& kw : bot_keywords)
                if (contains_keyword(t.text, kw)) ++bot_count[{d, kw}];
        }
        const double s = spec.bot_traffic_share;
        std::size_t rotor = 0;
        for (int d = 0; d < D; ++d) {
            Timestamp day = spec.start + static_cast<Timestamp>(d) * kSecondsPerDay;
            for (const std::string& kw : bot_keywords) {
                auto it = bot_count.find({d, kw});
                if (it == bot_count.end()) continue;
                auto quota = static_cast<std::int64_t>(
                    std::llround(static_cast<double>(it->second) * (1.0 - s) / s));
                for (std::int64_t n = 0; n < quota; ++n) {
                    const Account& a = humans[rotor++ % humans.size()];
                    std::string url = "http://" + kw + "/u" + std::to_string(hseq);
                    std::string text = human_templates()[hseq % human_templates().size()] + " " +
                                       url + " x" + std::to_string(hseq);
                    all.push_back(make_tweet(a, human_id(), text,
                                             day + rng.uniform_int(0, kSecondsPerDay - 1), {url}));
                }
            }
        }
    } else if (!humans.empty()) {
        for (int d = 0; d < D; ++d) {
            Timestamp day = spec.start + static_cast<Timestamp>(d) * kSecondsPerDay;
            for (std::size_t i = 0; i < humans.size(); ++i) {
                for (std::size_t n = 0; n < spec.human_tweets_per_day; ++n) {
                    std::string url;
                    if (i % 10 == 9) {
                        url = "http://youtube.com/watch?v=v" + std::to_string(hseq);
                    } else if (!spec.human_shorteners.empty()) {
                        const std::string& kw =
                            spec.human_shorteners[(i + static_cast<std::size_t>(d)) %
                                                  spec.human_shorteners.size()];
                        url = "http://" + kw + "/u" + std::to_string(hseq);
                    } else {
                        url = "http://example.org/u" + std::to_string(hseq);
                    }
                    std::string text = human_templates()[hseq % human_templates().size()] + " " +
                                       url + " x" + std::to_string(hseq);
                    all.push_back(make_tweet(humans[i], human_id(), text,
                                             day + rng.uniform_int(0, kSecondsPerDay - 1), {url}));
                }
            }
        }
    }

    std::sort(all.begin(), all.end(), [](const Tweet& a, const Tweet& b) {
        if (a.created_at != b.created_at) return a.created_at < b.created_at;
        return a.tweet_id < b.tweet_id;
    });
    world.stream = std::move(all);

    // daily ground truth per keyword of interest
    std::set<std::string> keywords = bot_keywords;
    keywords.insert(spec.human_shorteners.begin(), spec.human_shorteners.end());
    std::map<std::pair<std::string, std::string>, GroundTruth::Daily> daily;
    for (const Tweet& t : world.stream) {
        std::string date = format_date(t.created_at);
        for (const std::string& kw : keywords) {
            if (!contains_keyword(t.text, kw)) continue;
            auto& row = daily[{date, kw}];
            row.date = date;
            row.keyword = kw;
            ++row.total_tweets;
            if (world.truth.all_bots.count(t.author)) ++row.bot_tweets;
        }
    }
    for (auto& [key, row] : daily) world.truth.daily.push_back(row);
    world.truth.share_target = spec.bot_traffic_share;

    world.web = build_synthetic_web(spec);

    FakeRegistry registry;
    const Timestamp created = spec.start - kSecondsPerDay;  // one day before launch
    std::map<std::string, std::string> registrant_name;
    for (const RegistrantSpec& r : spec.registrants) {
        registrant_name[r.email] = r.name;
        for (const std::string& d : r.extra_domains)
            registry.add({d, r.email, r.name.empty() ? std::nullopt : std::optional(r.name),
                          created});
    }
    for (const BotnetSpec& b : spec.botnets) {
        if (b.registrant_email.empty()) continue;
        auto name_it = registrant_name.find(b.registrant_email);
        std::optional<std::string> name;
        if (name_it != registrant_name.end() && !name_it->second.empty()) name = name_it->second;
        registry.add({registrable_domain(landing_host(b)), b.registrant_email, name, created});
    }
    world.registry_json = registry.to_json();

    world.whitelist = {"twitter.com", "facebook.com", "instagram.com", "youtube.com"};
    if (!spec.safe_site.empty()) world.whitelist.push_back(spec.safe_site);
    std::sort(world.whitelist.begin(), world.whitelist.end());
    world.whitelist.erase(std::unique(world.whitelist.begin(), world.whitelist.end()),
                          world.whitelist.end());
    return world;
}

// ---------------------------------------------------------------------------
// scenario json

static json botnet_to_json_spec(const BotnetSpec& b) {
    json j;
    j["mechanism"] = b.mechanism;
    j["size"] = b.size;
    j["tweets_per_account"] = b.tweets_per_account;
    j["duplicate_texts"] = b.duplicate_texts;
    j["shortener"] = b.shortener;
    j["landing_domain"] = b.landing_domain;
    if (!b.landing_subdomain.empty()) j["landing_subdomain"] = b.landing_subdomain;
    j["archetype"] = b.archetype;
    if (!b.registrant_email.empty()) j["registrant_email"] = b.registrant_email;
    if (b.unique_filler_per_account) j["unique_filler_per_account"] = b.unique_filler_per_account;
    j["legit_texts_per_account"] = b.legit_texts_per_account;
    if (b.legit_texts_max) j["legit_texts_max"] = b.legit_texts_max;
    j["mention_variants"] = b.mention_variants;
    return j;
}

static BotnetSpec botnet_from_json_spec(const json& j) {
    BotnetSpec b;
    b.mechanism = j.value("mechanism", "traditional");
    b.size = j.value("size", std::size_t{20});
    b.tweets_per_account = j.value("tweets_per_account", std::size_t{1});
    b.duplicate_texts = j.value("duplicate_texts", std::size_t{12});
    b.shortener = j.value("shortener", "dld.bz");
    b.landing_domain = j.value("landing_domain", "landing.example");
    b.landing_subdomain = j.value("landing_subdomain", "");
    b.archetype = j.value("archetype", "phishing");
    b.registrant_email = j.value("registrant_email", "");
    b.unique_filler_per_account = j.value("unique_filler_per_account", std::size_t{0});
    b.legit_texts_per_account = j.value("legit_texts_per_account", std::size_t{5});
    b.legit_texts_max = j.value("legit_texts_max", std::size_t{0});
    b.mention_variants = j.value("mention_variants", std::size_t{2});
    return b;
}

std::string ScenarioSpec::to_json() const {
    json j;
    j["seed"] = seed;
    j["name"] = name;
    j["start_date"] = format_timestamp(start);
    j["duration_days"] = duration_days;
    j["human_accounts"] = human_accounts;
    j["bot_traffic_share"] = bot_traffic_share;
    j["human_tweets_per_day"] = human_tweets_per_day;
    j["human_shorteners"] = human_shorteners;
    j["safe_site"] = safe_site;
    j["spam_parent_domain"] = spam_parent_domain;
    json bots = json::array();
    for (const auto& b : botnets) bots.push_back(botnet_to_json_spec(b));
    j["botnets"] = std::move(bots);
    json regs = json::array();
    for (const auto& r : registrants)
        regs.push_back(json{{"email", r.email}, {"name", r.name}, {"extra_domains", r.extra_domains}});
    j["registrants"] = std::move(regs);
    return j.dump(2);
}

ScenarioSpec ScenarioSpec::from_json(const std::string& text) {
    json j = json::parse(text);
    ScenarioSpec s;
    s.seed = j.value("seed", std::uint64_t{1});
    s.name = j.value("name", "scenario");
    if (j.contains("start_date"))
        s.start = parse_timestamp(j.at("start_date").get<std::string>()).value_or(s.start);
    s.duration_days = j.value("duration_days", 14);
    s.human_accounts = j.value("human_accounts", std::size_t{0});
    s.bot_traffic_share = j.value("bot_traffic_share", 0.0);
    s.human_tweets_per_day = j.value("human_tweets_per_day", std::size_t{1});
    if (j.contains("human_shorteners"))
        s.human_shorteners = j.at("human_shorteners").get<std::vector<std::string>>();
    s.safe_site = j.value("safe_site", "google.com");
    s.spam_parent_domain = j.value("spam_parent_domain", "best-offers-daily.example");
    if (j.contains("botnets"))
        for (const auto& b : j.at("botnets")) s.botnets.push_back(botnet_from_json_spec(b));
    if (j.contains("registrants"))
        for (const auto& r : j.at("registrants")) {
            RegistrantSpec reg;
            reg.email = r.at("email").get<std::string>();
            reg.name = r.value("name", "");
            if (r.contains("extra_domains"))
                reg.extra_domains = r.at("extra_domains").get<std::vector<std::string>>();
            s.registrants.push_back(std::move(reg));
        }
    return s;
}

ScenarioSpec ScenarioSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string GroundTruth::to_json() const {
    json j;
    json bots = json::object();
    for (const auto& [name, members] : bots_by_botnet)
        bots[name] = std::vector<std::string>(members.begin(), members.end());
    j["bots_by_botnet"] = std::move(bots);
    j["all_bots"] = std::vector<std::string>(all_bots.begin(), all_bots.end());
    json d = json::array();
    for (const auto& row : daily)
        d.push_back(json{{"date", row.date},
                         {"keyword", row.keyword},
                         {"bot_tweets", row.bot_tweets},
                         {"total_tweets", row.total_tweets}});
    j["daily"] = std::move(d);
    j["share_target"] = share_target;
    return j.dump(2);
}

GroundTruth GroundTruth::from_json(const std::string& text) {
    json j = json::parse(text);
    GroundTruth t;
    if (j.contains("bots_by_botnet"))
        for (auto it = j.at("bots_by_botnet").begin(); it != j.at("bots_by_botnet").end(); ++it)
            for (const auto& a : it.value()) t.bots_by_botnet[it.key()].insert(a.get<std::string>());
    if (j.contains("all_bots"))
        for (const auto& a : j.at("all_bots")) t.all_bots.insert(a.get<std::string>());
    if (j.contains("daily"))
        for (const auto& d : j.at("daily")) {
            Daily row;
            row.date = d.at("date").get<std::string>();
            row.keyword = d.at("keyword").get<std::string>();
            row.bot_tweets = d.value("bot_tweets", std::int64_t{0});
            row.total_tweets = d.value("total_tweets", std::int64_t{0});
            t.daily.push_back(std::move(row));
        }
    t.share_target = j.value("share_target", 0.0);
    return t;
}

GroundTruth GroundTruth::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open truth: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

// ---------------------------------------------------------------------------
// presets

std::vector<std::string> preset_names() {
    return {"default", "fraction30", "linkfarm", "sweep", "straddle"};
}

ScenarioSpec preset_scenario(const std::string& name) {
    ScenarioSpec s;
    s.name = name;
    s.seed = 42;

    auto trad = [](std::size_t size, const std::string& shortener, const std::string& domain,
                   const std::string& sub, const std::string& archetype,
                   const std::string& email) {
        BotnetSpec b;
        b.mechanism = "traditional";
        b.size = size;
        b.duplicate_texts = 12;
        b.shortener = shortener;
        b.landing_domain = domain;
        b.landing_subdomain = sub;
        b.archetype = archetype;
        b.registrant_email = email;
        return b;
    };

    if (name == "default") {
        s.human_accounts = 2000;
        s.duration_days = 14;
        s.botnets.push_back(trad(20, "dld.bz", "feedsted.us", "savingzev", "secret",
                                 "zev.farm@mail.example"));
        s.botnets.push_back(trad(30, "bit.ly", "likelisi.club", "", "phishing",
                                 "zev.farm@mail.example"));
        s.botnets.push_back(trad(40, "tinyurl.com", "qualifystory.us", "savingzev", "phishing",
                                 "promo.blast@mail.example"));
        s.botnets.push_back(trad(50, "ow.ly", "hopchain.example", "", "chain:7", ""));
        s.botnets.push_back(trad(60, "twitbr.tk", "viraltt.tk", "", "phishing",
                                 "promo.blast@mail.example"));
        BotnetSpec h1;
        h1.mechanism = "hijacked";
        h1.size = 30;
        h1.duplicate_texts = 15;
        h1.shortener = "dlvr.it";
        h1.landing_domain = "newsboost.club";
        h1.archetype = "phishing";
        h1.registrant_email = "prayer.apps@mail.example";
        s.botnets.push_back(h1);
        BotnetSpec h2 = h1;
        h2.shortener = "goo.gl";
        h2.landing_domain = "vidisp.review";
        h2.archetype = "secret";
        s.botnets.push_back(h2);
        s.registrants = {
            {"zev.farm@mail.example", "Giulia Marchetti", {"renewsfeed.us"}},
            {"promo.blast@mail.example", "Chris M Weber", {}},
            {"prayer.apps@mail.example", "S Vail", {}},
        };
    } else if (name == "fraction30") {
        s.human_accounts = 600;
        s.duration_days = 14;
        s.bot_traffic_share = 0.30;
        s.botnets.push_back(trad(30, "dld.bz", "fr30a.example", "", "phishing",
                                 "ops30@mail.example"));
        s.botnets.push_back(trad(30, "dld.bz", "fr30b.example", "", "phishing",
                                 "ops30@mail.example"));
        s.registrants = {{"ops30@mail.example", "A Seller", {}}};
    } else if (name == "linkfarm") {
        s.human_accounts = 200;
        s.duration_days = 7;
        const char* shorteners[] = {"bit.ly", "goo.gl", "ow.ly", "dld.bz", "tinyurl.com"};
        RegistrantSpec reg{"linkfarm.ops@mail.example", "Ray Colton", {}};
        for (int i = 0; i < 5; ++i) {
            BotnetSpec b = trad(20 + 4 * static_cast<std::size_t>(i), shorteners[i],
                                "farm" + pad(static_cast<std::size_t>(i), 2) + ".example", "",
                                "phishing", reg.email);
            b.duplicate_texts = 10;
            s.botnets.push_back(b);
        }
        for (std::size_t i = 5; i < 40; ++i)
            reg.extra_domains.push_back("farm" + pad(i, 2) + ".example");
        s.registrants = {reg};
    } else if (name == "sweep") {
        s.human_accounts = 200;
        s.duration_days = 1;
        s.human_shorteners = {"dld.bz"};
        auto band = [&](std::size_t shared, std::size_t filler) {
            BotnetSpec b = trad(40, "dld.bz",
                                "sw" + std::to_string(s.botnets.size()) + ".example", "",
                                "phishing", "sweep.ops@mail.example");
            b.duplicate_texts = shared;
            b.tweets_per_account = shared;  // post the whole set on day one
            b.unique_filler_per_account = filler;
            return b;
        };
        s.botnets.push_back(band(7, 13));   // overlap ratio 0.35
        s.botnets.push_back(band(9, 11));   // 0.45
        s.botnets.push_back(band(11, 9));   // 0.55
        s.botnets.push_back(band(20, 0));   // 1.0
        s.botnets.push_back(band(20, 0));
        s.botnets.push_back(band(20, 0));
        BotnetSpec paired = trad(40, "dld.bz", "sw6.example", "", "phishing",
                                 "sweep.ops@mail.example");
        paired.mechanism = "paired";
        paired.duplicate_texts = 1;
        paired.unique_filler_per_account = 19;  // pair-shared texts
        s.botnets.push_back(paired);
        s.registrants = {{"sweep.ops@mail.example", "B Park", {}}};
    } else if (name == "straddle") {
        s.human_accounts = 100;
        s.duration_days = 15;
        BotnetSpec h;
        h.mechanism = "hijacked";
        h.size = 30;
        h.duplicate_texts = 15;
        h.shortener = "dlvr.it";
        h.landing_domain = "straddle.example";
        h.archetype = "phishing";
        h.registrant_email = "straddle@mail.example";
        h.legit_texts_per_account = 5;   // ratio 15/20 = 0.75, flagged
        h.legit_texts_max = 15;          // ratio 15/30 = 0.50, spared
        h.mention_variants = 0;
        s.botnets.push_back(h);
        s.registrants = {{"straddle@mail.example", "C Indeterminado", {}}};
    } else {
        throw std::runtime_error("unknown preset: " + name);
    }
    return s;
}

// ---------------------------------------------------------------------------
// file output

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string run_config_json() {
    json keywords = json::array();
    for (const char* kw : {"bit.ly", "ift.tt", "ow.ly", "goo.gl", "tinyurl.com", "dlvr.it",
                           "dld.bz"})
        keywords.push_back(json{{"keyword", kw}, {"interval_hours", 24}, {"tweets_per_run", 30000}});
    json j;
    j["stream"] = {{"uri", "stream.jsonl"}, {"keyword", "http"}};
    j["keywords"] = std::move(keywords);
    j["monitor"] = {{"top_k", 15}, {"window_minutes", 60}, {"whitelist_path", "whitelist.txt"}};
    j["detection"] = {{"alpha", 3},
                      {"beta", 0.6},
                      {"min_group_size", 20},
                      {"timeline_depth", 200},
                      {"strip_urls_before_hash", false}};
    j["resolver"] = {{"max_retry", 5},
                     {"follow_all_3xx", false},
                     {"web_spec", "web.json"},
                     {"per_hop_timeout_seconds", 10},
                     {"total_budget_seconds", 60}};
    j["whois"] = {{"registry", "registry.json"}};
    j["store"] = {{"path", "store.jsonl"}};
    j["api"] = {{"port", 0}};
    j["clock"] = {{"mode", "simulated"}};
    j["workers"] = 4;
    j["campaign"] = {{"use_all_urls", false}};
    return j.dump(2);
}

}  // namespace

void write_world(const SyntheticWorld& world, const ScenarioSpec& spec,
                 const std::string& out_dir) {
    fs::create_directories(out_dir);
    fs::path dir(out_dir);

    std::string stream;
    for (const Tweet& t : world.stream) {
        stream += tweet_to_json(t);
        stream += '\n';
    }
    write_file(dir / "stream.jsonl", stream);
    write_file(dir / "web.json", world.web.to_json());
    write_file(dir / "registry.json", world.registry_json);
    write_file(dir / "truth.json", world.truth.to_json());
    std::string wl = "# trusted netlocs, never trigger detection\n";
    for (const std::string& n : world.whitelist) {
        wl += n;
        wl += '\n';
    }
    write_file(dir / "whitelist.txt", wl);
    write_file(dir / "scenario.json", spec.to_json());
    write_file(dir / "config.json", run_config_json());
}

// ---------------------------------------------------------------------------
// evaluation

Evaluation evaluate(const std::vector<BotGroup>& detected, const GroundTruth& truth) {
    Evaluation ev;
    std::set<AccountId> predicted;
    for (const BotGroup& g : detected) predicted.insert(g.members.begin(), g.members.end());

    std::size_t hits = 0;
    for (const AccountId& a : predicted)
        if (truth.all_bots.count(a)) ++hits;

    if (predicted.empty()) {
        ev.precision = 1.0;  // zero support, flagged for the caller
        ev.precision_no_support = true;
    } else {
        ev.precision = static_cast<double>(hits) / static_cast<double>(predicted.size());
    }
    ev.recall = truth.all_bots.empty()
                    ? 1.0
                    : static_cast<double>(hits) / static_cast<double>(truth.all_bots.size());

    for (const auto& [name, planted] : truth.bots_by_botnet) {
        double best = 0.0;
        for (const BotGroup& g : detected) {
            std::size_t inter = 0;
            for (const AccountId& a : g.members)
                if (planted.count(a)) ++inter;
            if (inter == 0) continue;
            double p = static_cast<double>(inter) / static_cast<double>(g.members.size());
            double r = static_cast<double>(inter) / static_cast<double>(planted.size());
            best = std::max(best, 2.0 * p * r / (p + r));
        }
        ev.per_group_f1[name] = best;
    }
    return ev;
}

// ---------------------------------------------------------------------------
// parameter sweep

SweepReport sweep(const std::vector<Tweet>& batch, TimelineProvider& provider,
                  const std::vector<int>& factors, const std::vector<double>& ratios,
                  const DetectionParams& base, unsigned workers) {
    std::vector<int> alphas = factors;
    std::vector<double> betas = ratios;
    std::sort(alphas.begin(), alphas.end());
    alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
    std::sort(betas.begin(), betas.end());
    betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
    if (alphas.empty() || betas.empty()) throw std::invalid_argument("empty sweep range");

    // candidate groups and timelines do not depend on the swept parameters
    auto groups = group_by_duplicate(batch, base.min_group_size, base);
    std::set<std::set<AccountId>> seen;
    std::vector<CandidateGroup> unique_groups;
    for (auto& g : groups)
        if (seen.insert(g.accounts).second) unique_groups.push_back(std::move(g));

    auto fetched = parallel_map<std::map<AccountId, Timeline>>(
        unique_groups.size(),
        [&](std::size_t i) {
            auto f = fetch_timelines(unique_groups[i], provider, base.timeline_depth);
            if (f.timelines.size() < base.min_group_size) f.timelines.clear();
            return std::move(f.timelines);
        },
        1 /* provider not assumed thread-safe */);

    SweepReport report;
    for (int a : alphas) {
        for (double b : betas) {
            DetectionParams p = base;
            p.min_duplicate_factor = a;
            p.overlap_ratio = b;
            std::set<AccountId> bots;
            for (const auto& timelines : fetched) {
                if (timelines.empty()) continue;
                DetectionResult r = detect_botnet(timelines, p);
                bots.insert(r.bots.begin(), r.bots.end());
            }
            report.table.push_back({a, b, bots.size()});
        }
    }
    (void)workers;

    auto nearest_alpha = [&](int want) {
        int best = alphas.front();
        for (int a : alphas)
            if (std::abs(a - want) < std::abs(best - want)) best = a;
        return best;
    };
    auto nearest_beta = [&](double want) {
        double best = betas.front();
        for (double b : betas)
            if (std::abs(b - want) < std::abs(best - want)) best = b;
        return best;
    };
    report.alpha_ref = nearest_alpha(3);
    report.beta_ref = nearest_beta(0.6);

    for (const auto& cell : report.table) {
        if (cell.overlap_ratio == report.beta_ref)
            report.alpha_axis.emplace_back(cell.min_duplicate_factor, cell.bot_count);
        if (cell.min_duplicate_factor == report.alpha_ref)
            report.beta_axis.emplace_back(cell.overlap_ratio, cell.bot_count);
    }

    if (report.alpha_axis.size() >= 2) {
        std::size_t best_i = 1;
        std::int64_t best_drop = -1;
        for (std::size_t i = 1; i < report.alpha_axis.size(); ++i) {
            std::int64_t drop = static_cast<std::int64_t>(report.alpha_axis[i - 1].second) -
                                static_cast<std::int64_t>(report.alpha_axis[i].second);
            if (drop > best_drop) {
                best_drop = drop;
                best_i = i;
            }
        }
        report.alpha_largest_drop = std::to_string(report.alpha_axis[best_i - 1].first) + "->" +
                                    std::to_string(report.alpha_axis[best_i].first);
    }

    if (!report.beta_axis.empty()) {
        std::size_t lo = report.beta_axis.front().second, hi = lo;
        for (const auto& [b, c] : report.beta_axis) {
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        double eps = 0.05 * static_cast<double>(hi - lo);
        report.beta_plateau_onset = report.beta_axis.back().first;
        for (std::size_t i = 0; i < report.beta_axis.size(); ++i) {
            bool settled = true;
            for (std::size_t j = i + 1; j < report.beta_axis.size(); ++j) {
                double drop = static_cast<double>(report.beta_axis[j - 1].second) -
                              static_cast<double>(report.beta_axis[j].second);
                if (drop > eps) {
                    settled = false;
                    break;
                }
            }
            if (settled) {
                report.beta_plateau_onset = report.beta_axis[i].first;
                break;
            }
        }
    }
    return report;
}

std::string SweepReport::to_csv() const {
    std::string out = "alpha,beta,bot_count\n";
    char buf[64];
    for (const auto& c : table) {
        std::snprintf(buf, sizeof(buf), "%d,%g,%zu\n", c.min_duplicate_factor, c.overlap_ratio,
                      c.bot_count);
        out += buf;
    }
    return out;
}

std::string SweepReport::elbow_json() const {
    json j;
    j["deployed"] = {{"alpha", alpha_ref}, {"beta", beta_ref}};
    json acounts = json::array();
    for (const auto& [a, c] : alpha_axis) acounts.push_back({a, c});
    j["alpha_axis"] = {{"beta", beta_ref},
                       {"counts", std::move(acounts)},
                       {"largest_marginal_decrease", alpha_largest_drop}};
    json bcounts = json::array();
    for (const auto& [b, c] : beta_axis) bcounts.push_back({b, c});
    j["beta_axis"] = {{"alpha", alpha_ref},
                      {"counts", std::move(bcounts)},
                      {"plateau_onset", beta_plateau_onset}};
    return j.dump(2);
}

}  // namespace spamwatch
