#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "spamwatch/campaign.hpp"
#include "spamwatch/core.hpp"

#include <nlohmann/json.hpp>

namespace spamwatch {

struct StoreError : std::runtime_error {
    explicit StoreError(const std::string& what) : std::runtime_error(what) {}
};

struct DailyStat {
    std::string date;  // YYYY-MM-DD
    std::string keyword;
    std::int64_t bot_tweets = 0;
    std::int64_t total_tweets = 0;
    double fraction = 0.0;  // percent
};

// Detection report per group, the JSON object served and stored.
nlohmann::json botnet_to_json(const BotGroup& g);
nlohmann::json campaign_to_json(const Campaign& c);
nlohmann::json daily_stat_to_json(const DailyStat& s);
nlohmann::json blacklist_entry_to_json(const BlacklistEntry& e);
nlohmann::json account_to_json(const Account& a);  // the seven displayed fields

// Append-only JSON-lines log with in-memory indexes rebuilt at open. Last
// record per key wins, so re-detections upsert. An empty path keeps the
// store memory-only (tests). Writes are flushed before acknowledgment and a
// torn trailing line is dropped at recovery.
class DetectionStore {
public:
    explicit DetectionStore(const std::string& path);
    ~DetectionStore();

    void record(const BotGroup& g);
    void record(const Campaign& c);
    void record(const DailyStat& s);
    void record(const BlacklistEntry& e);

    // The persisted blacklist as a mergeable view; update_blacklist works on
    // this and changed entries go back through record().
    Blacklist& blacklist() { return blacklist_; }

    std::vector<nlohmann::json> groups(const std::string& keyword = "",
                                       const std::string& date = "") const;
    std::optional<nlohmann::json> group_by_id(const std::string& id) const;
    std::optional<BotGroup> botgroup_by_id(const std::string& id) const;
    std::vector<Account> accounts_of_group(const std::string& id) const;
    std::vector<nlohmann::json> campaigns() const;
    std::optional<nlohmann::json> campaign_by_email(const std::string& email) const;
    std::vector<nlohmann::json> blacklist_entries() const;
    std::vector<nlohmann::json> daily_stats(const std::string& keyword = "") const;

    std::size_t group_count() const;
    const std::string& path() const { return path_; }

private:
    void append(const std::string& type, const nlohmann::json& payload);
    void load();
    void apply(const std::string& type, const nlohmann::json& payload);

    std::string path_;
    mutable std::mutex mu_;
    FILE* log_ = nullptr;

    std::map<std::string, BotGroup> botnets_;                  // by group_id
    std::map<std::string, Account> accounts_;                  // by account_id
    std::map<std::string, Campaign> campaigns_;                // by email
    std::map<std::pair<std::string, std::string>, DailyStat> stats_;  // (date, keyword)
    Blacklist blacklist_;
};

BotGroup botnet_from_json(const nlohmann::json& j);
Campaign campaign_from_json(const nlohmann::json& j);
DailyStat daily_stat_from_json(const nlohmann::json& j);
BlacklistEntry blacklist_entry_from_json(const nlohmann::json& j);

}  // namespace spamwatch
