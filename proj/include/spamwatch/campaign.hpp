#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spamwatch/core.hpp"
#include "spamwatch/resolver.hpp"

namespace spamwatch {

// The registrable (public-suffix aware) domain of a host: "savingzev.
// feedsted.us" -> "feedsted.us". Ports are stripped; single-label hosts and
// IPs come back unchanged.
std::string registrable_domain(const std::string& netloc);

struct RegistrantRecord {
    std::string domain;
    std::optional<std::string> email;
    std::optional<std::string> name;
    std::optional<Timestamp> created_on;
};

struct ProviderUnavailable : std::runtime_error {
    explicit ProviderUnavailable(const std::string& what) : std::runtime_error(what) {}
};

class WhoisProvider {
public:
    virtual ~WhoisProvider() = default;
    // nullopt = no record for the domain. Throws ProviderUnavailable on
    // transient failure.
    virtual std::optional<RegistrantRecord> lookup(const std::string& domain) = 0;
    // Reverse lookup; nullopt when the provider cannot enumerate (the fake
    // registry can, a plain WHOIS client cannot).
    virtual std::optional<std::vector<std::string>> domains_registered_by(
        const std::string& email) {
        return std::nullopt;
    }
};

// JSON map domain -> {email, name, created_on}; its own ground truth in
// tests and generated worlds.
class FakeRegistry : public WhoisProvider {
public:
    static FakeRegistry from_json(const std::string& json_text);
    static FakeRegistry load(const std::string& path);
    std::string to_json() const;

    void add(const RegistrantRecord& record);
    std::optional<RegistrantRecord> lookup(const std::string& domain) override;
    std::optional<std::vector<std::string>> domains_registered_by(
        const std::string& email) override;

private:
    std::map<std::string, RegistrantRecord> by_domain_;
};

// Keys the query on the registrable domain and retries ProviderUnavailable
// with backoff (sleeper injectable for tests). nullopt = NoRecord.
std::optional<RegistrantRecord> lookup_registrant(
    const std::string& domain, WhoisProvider& provider, int max_attempts = 3,
    std::function<void(int /*attempt*/)> backoff = nullptr);

struct Campaign {
    std::string registrant_email;
    std::optional<std::string> registrant_name;
    std::set<std::string> domains;
    std::set<std::string> botnets;  // group ids
    std::size_t total_accounts = 0; // exact union over member sets
};

struct CampaignMapping {
    std::vector<Campaign> campaigns;           // sorted by email
    std::vector<std::string> benign;           // group ids skipped: URL not malicious
    std::vector<std::string> unknown_registrant;  // malicious but no WHOIS record
};

struct CampaignOptions {
    // Default: only the dominant URL feeds the mapping. Widening considers
    // every embedded URL with a completed resolution.
    bool use_all_urls = false;
};

// Groups botnets with malicious resolutions by the registrant email of the
// final landing domain. When the provider supports reverse lookup, a
// campaign also absorbs the registrant's other (possibly dormant) domains.
CampaignMapping map_campaigns(const std::vector<BotGroup>& botnets,
                              const std::map<std::string, ResolvedUrl>& resolutions,
                              WhoisProvider& whois, const CampaignOptions& opts = {});

enum class BlacklistKind { Email, UrlDomain, Account };

struct BlacklistEntry {
    BlacklistKind kind;
    std::string value;
    std::set<std::string> evidence;  // group ids
    Timestamp first_seen = 0;
    Timestamp last_seen = 0;
};

const char* blacklist_kind_name(BlacklistKind k);

// In-memory blacklist with set-union merge; (kind, value) unique. Upserts
// are idempotent and commutative across insertion order.
class Blacklist {
public:
    // Returns only the entries that actually changed; an identical upsert
    // returns nothing.
    std::vector<BlacklistEntry> upsert(const BlacklistEntry& entry);
    const std::map<std::pair<int, std::string>, BlacklistEntry>& entries() const {
        return entries_;
    }
    std::optional<BlacklistEntry> find(BlacklistKind kind, const std::string& value) const;
    // JSON lines, sorted by (kind, value); the export wire format.
    std::string export_json_lines() const;

private:
    std::map<std::pair<int, std::string>, BlacklistEntry> entries_;
};

// Upserts email + domain + member-account entries for every campaign, with
// evidence merged and last_seen refreshed to `now`. Returns the changed
// entries (empty on an exact repeat).
std::vector<BlacklistEntry> update_blacklist(Blacklist& store,
                                             const std::vector<Campaign>& campaigns,
                                             const std::map<std::string, BotGroup>& botnets_by_id,
                                             Timestamp now);

}  // namespace spamwatch
