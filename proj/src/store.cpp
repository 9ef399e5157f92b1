#include "spamwatch/store.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace spamwatch {

using nlohmann::json;

// ---------------------------------------------------------------------------
// record (de)serialization

json account_to_json(const Account& a) {
    return json{{"id", a.account_id},
                {"screen_name", a.screen_name},
                {"statuses_count", a.statuses_count},
                {"friends_count", a.friends_count},
                {"followers_count", a.followers_count},
                {"lang", a.lang},
                {"created_at", format_timestamp(a.created_at)}};
}

static Account account_from_json(const json& j) {
    Account a;
    a.account_id = j.at("id").get<std::string>();
    a.screen_name = j.value("screen_name", "");
    a.statuses_count = j.value("statuses_count", std::int64_t{0});
    a.friends_count = j.value("friends_count", std::int64_t{0});
    a.followers_count = j.value("followers_count", std::int64_t{0});
    a.lang = j.value("lang", "");
    if (j.contains("created_at"))
        a.created_at = parse_timestamp(j.at("created_at").get<std::string>()).value_or(0);
    return a;
}

json botnet_to_json(const BotGroup& g) {
    json j;
    j["group_id"] = g.group_id;
    j["keyword"] = g.trigger_keyword;
    j["alpha"] = g.min_duplicate_factor_used;
    j["beta"] = g.overlap_ratio_used;
    j["member_count"] = g.candidate_size;
    j["bot_count"] = g.members.size();
    j["frequent_tweet_count"] = g.frequent_tweets.size();
    j["dominant_url"] = g.dominant_url;
    j["detected_at"] = format_timestamp(g.detected_at);
    j["bot_accounts"] = std::vector<std::string>(g.members.begin(), g.members.end());
    json profiles = json::array();
    for (const Account& a : g.member_profiles) profiles.push_back(account_to_json(a));
    j["accounts"] = std::move(profiles);
    if (!g.embedded_urls.empty())
        j["embedded_urls"] =
            std::vector<std::string>(g.embedded_urls.begin(), g.embedded_urls.end());
    if (!g.frequent_tweets.empty())
        j["frequent_tweets"] =
            std::vector<std::string>(g.frequent_tweets.begin(), g.frequent_tweets.end());
    return j;
}

BotGroup botnet_from_json(const json& j) {
    BotGroup g;
    g.group_id = j.at("group_id").get<std::string>();
    g.trigger_keyword = j.value("keyword", "");
    g.min_duplicate_factor_used = j.value("alpha", 0);
    g.overlap_ratio_used = j.value("beta", 0.0);
    g.candidate_size = j.value("member_count", std::size_t{0});
    g.dominant_url = j.value("dominant_url", "");
    if (j.contains("detected_at"))
        g.detected_at = parse_timestamp(j.at("detected_at").get<std::string>()).value_or(0);
    if (j.contains("bot_accounts"))
        for (const auto& a : j.at("bot_accounts")) g.members.insert(a.get<std::string>());
    if (j.contains("accounts"))
        for (const auto& a : j.at("accounts")) g.member_profiles.push_back(account_from_json(a));
    if (j.contains("embedded_urls"))
        for (const auto& u : j.at("embedded_urls")) g.embedded_urls.insert(u.get<std::string>());
    if (j.contains("frequent_tweets"))
        for (const auto& t : j.at("frequent_tweets"))
            g.frequent_tweets.insert(t.get<std::string>());
    return g;
}

json campaign_to_json(const Campaign& c) {
    json j;
    j["registrant_email"] = c.registrant_email;
    if (c.registrant_name) j["registrant_name"] = *c.registrant_name;
    j["domains"] = std::vector<std::string>(c.domains.begin(), c.domains.end());
    j["botnets"] = std::vector<std::string>(c.botnets.begin(), c.botnets.end());
    j["total_accounts"] = c.total_accounts;
    return j;
}

Campaign campaign_from_json(const json& j) {
    Campaign c;
    c.registrant_email = j.at("registrant_email").get<std::string>();
    if (j.contains("registrant_name")) c.registrant_name = j.at("registrant_name").get<std::string>();
    for (const auto& d : j.at("domains")) c.domains.insert(d.get<std::string>());
    for (const auto& b : j.at("botnets")) c.botnets.insert(b.get<std::string>());
    c.total_accounts = j.value("total_accounts", std::size_t{0});
    return c;
}

json daily_stat_to_json(const DailyStat& s) {
    return json{{"date", s.date},
                {"keyword", s.keyword},
                {"bot_tweets", s.bot_tweets},
                {"total_tweets", s.total_tweets},
                {"fraction", s.fraction}};
}

DailyStat daily_stat_from_json(const json& j) {
    DailyStat s;
    s.date = j.at("date").get<std::string>();
    s.keyword = j.at("keyword").get<std::string>();
    s.bot_tweets = j.value("bot_tweets", std::int64_t{0});
    s.total_tweets = j.value("total_tweets", std::int64_t{0});
    s.fraction = j.value("fraction", 0.0);
    return s;
}

json blacklist_entry_to_json(const BlacklistEntry& e) {
    return json{{"kind", blacklist_kind_name(e.kind)},
                {"value", e.value},
                {"evidence", std::vector<std::string>(e.evidence.begin(), e.evidence.end())},
                {"first_seen", format_timestamp(e.first_seen)},
                {"last_seen", format_timestamp(e.last_seen)}};
}

BlacklistEntry blacklist_entry_from_json(const json& j) {
    BlacklistEntry e;
    std::string kind = j.at("kind").get<std::string>();
    e.kind = kind == "email"     ? BlacklistKind::Email
             : kind == "url"     ? BlacklistKind::UrlDomain
                                 : BlacklistKind::Account;
    e.value = j.at("value").get<std::string>();
    for (const auto& g : j.at("evidence")) e.evidence.insert(g.get<std::string>());
    e.first_seen = parse_timestamp(j.at("first_seen").get<std::string>()).value_or(0);
    e.last_seen = parse_timestamp(j.at("last_seen").get<std::string>()).value_or(0);
    return e;
}

// ---------------------------------------------------------------------------
// store

DetectionStore::DetectionStore(const std::string& path) : path_(path) {
    load();
    if (!path_.empty()) {
        log_ = std::fopen(path_.c_str(), "ab");
        if (!log_) throw StoreError("cannot open store for append: " + path_);
    }
}

DetectionStore::~DetectionStore() {
    if (log_) std::fclose(log_);
}

void DetectionStore::load() {
    if (path_.empty()) return;
    std::ifstream in(path_);
    if (!in) return;  // fresh store
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("type")) continue;  // torn write
        try {
            apply(j.at("type").get<std::string>(), j.at("record"));
        } catch (const std::exception&) {
            // a partially written record is treated like a torn line
        }
    }
}

void DetectionStore::apply(const std::string& type, const json& payload) {
    if (type == "botnet") {
        BotGroup g = botnet_from_json(payload);
        for (const Account& a : g.member_profiles) accounts_[a.account_id] = a;
        botnets_[g.group_id] = std::move(g);
    } else if (type == "campaign") {
        Campaign c = campaign_from_json(payload);
        campaigns_[c.registrant_email] = std::move(c);
    } else if (type == "daily_stat") {
        DailyStat s = daily_stat_from_json(payload);
        stats_[{s.date, s.keyword}] = std::move(s);
    } else if (type == "blacklist") {
        blacklist_.upsert(blacklist_entry_from_json(payload));
    }
}

void DetectionStore::append(const std::string& type, const json& payload) {
    if (!log_) return;
    json j;
    j["type"] = type;
    j["record"] = payload;
    std::string line = j.dump();
    line += '\n';
    if (std::fwrite(line.data(), 1, line.size(), log_) != line.size())
        throw StoreError("short write to " + path_);
    if (std::fflush(log_) != 0) throw StoreError("flush failed on " + path_);
}

void DetectionStore::record(const BotGroup& g) {
    std::lock_guard<std::mutex> lock(mu_);
    json payload = botnet_to_json(g);
    append("botnet", payload);
    apply("botnet", payload);
}

void DetectionStore::record(const Campaign& c) {
    std::lock_guard<std::mutex> lock(mu_);
    json payload = campaign_to_json(c);
    append("campaign", payload);
    apply("campaign", payload);
}

void DetectionStore::record(const DailyStat& s) {
    std::lock_guard<std::mutex> lock(mu_);
    json payload = daily_stat_to_json(s);
    append("daily_stat", payload);
    apply("daily_stat", payload);
}

void DetectionStore::record(const BlacklistEntry& e) {
    std::lock_guard<std::mutex> lock(mu_);
    json payload = blacklist_entry_to_json(e);
    append("blacklist", payload);
    blacklist_.upsert(e);
}

std::vector<json> DetectionStore::groups(const std::string& keyword,
                                         const std::string& date) const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<const BotGroup*> filtered;
    for (const auto& [id, g] : botnets_) {
        if (!keyword.empty() && g.trigger_keyword != keyword) continue;
        if (!date.empty() && format_date(g.detected_at) != date) continue;
        filtered.push_back(&g);
    }
    std::sort(filtered.begin(), filtered.end(), [](const BotGroup* a, const BotGroup* b) {
        if (a->detected_at != b->detected_at) return a->detected_at < b->detected_at;
        return a->group_id < b->group_id;
    });
    std::vector<json> out;
    out.reserve(filtered.size());
    for (const BotGroup* g : filtered) {
        json j = botnet_to_json(*g);
        j.erase("accounts");  // listing stays compact; profiles live under /accounts
        out.push_back(std::move(j));
    }
    return out;
}

std::optional<json> DetectionStore::group_by_id(const std::string& id) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = botnets_.find(id);
    if (it == botnets_.end()) return std::nullopt;
    json j = botnet_to_json(it->second);
    j.erase("accounts");
    return j;
}

std::optional<BotGroup> DetectionStore::botgroup_by_id(const std::string& id) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = botnets_.find(id);
    if (it == botnets_.end()) return std::nullopt;
    return it->second;
}

std::vector<Account> DetectionStore::accounts_of_group(const std::string& id) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = botnets_.find(id);
    if (it == botnets_.end()) return {};
    std::vector<Account> out;
    for (const AccountId& a : it->second.members) {
        auto acc = accounts_.find(a);
        if (acc != accounts_.end()) out.push_back(acc->second);
    }
    return out;
}

std::vector<json> DetectionStore::campaigns() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<json> out;
    for (const auto& [email, c] : campaigns_) out.push_back(campaign_to_json(c));
    return out;
}

std::optional<json> DetectionStore::campaign_by_email(const std::string& email) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = campaigns_.find(email);
    if (it == campaigns_.end()) return std::nullopt;
    return campaign_to_json(it->second);
}

std::vector<json> DetectionStore::blacklist_entries() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<json> out;
    for (const auto& [key, e] : blacklist_.entries()) out.push_back(blacklist_entry_to_json(e));
    return out;
}

std::vector<json> DetectionStore::daily_stats(const std::string& keyword) const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<json> out;
    for (const auto& [key, s] : stats_) {
        if (!keyword.empty() && s.keyword != keyword) continue;
        out.push_back(daily_stat_to_json(s));
    }
    return out;
}

std::size_t DetectionStore::group_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return botnets_.size();
}

}  // namespace spamwatch
