#include "spamwatch/campaign.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace spamwatch {

using nlohmann::json;

namespace {

// Multi-label public suffixes the pipeline is likely to meet; everything
// else falls back to the last-two-labels rule.
const std::set<std::string>& multi_label_suffixes() {
    static const std::set<std::string> suffixes = {
        "co.uk", "org.uk", "gov.uk", "ac.uk", "me.uk",    "com.au", "net.au", "org.au",
        "co.jp", "ne.jp",  "or.jp",  "com.br", "net.br",  "com.cn", "net.cn", "org.cn",
        "co.in", "co.kr",  "com.mx", "com.tr", "com.ar",  "co.za",  "com.tw", "co.nz",
    };
    return suffixes;
}

bool looks_like_ipv4(const std::string& host) {
    int dots = 0;
    for (char c : host) {
        if (c == '.') ++dots;
        else if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return dots == 3;
}

}  // namespace

std::string registrable_domain(const std::string& netloc) {
    std::string host = netloc;
    if (!host.empty() && host[0] == '[') return host;  // IPv6 literal
    auto colon = host.rfind(':');
    if (colon != std::string::npos &&
        host.find_first_not_of("0123456789", colon + 1) == std::string::npos)
        host = host.substr(0, colon);
    std::transform(host.begin(), host.end(), host.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (looks_like_ipv4(host)) return host;

    std::vector<std::string> labels;
    std::size_t pos = 0;
    while (pos <= host.size()) {
        auto dot = host.find('.', pos);
        labels.push_back(host.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos));
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    if (labels.size() <= 2) return host;

    std::string last2 = labels[labels.size() - 2] + "." + labels.back();
    if (multi_label_suffixes().count(last2) && labels.size() >= 3)
        return labels[labels.size() - 3] + "." + last2;
    return last2;
}

// ---------------------------------------------------------------------------
// fake registry

FakeRegistry FakeRegistry::from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    FakeRegistry reg;
    for (auto it = j.begin(); it != j.end(); ++it) {
        RegistrantRecord rec;
        rec.domain = it.key();
        const json& v = it.value();
        if (v.contains("email") && !v.at("email").is_null())
            rec.email = v.at("email").get<std::string>();
        if (v.contains("name") && !v.at("name").is_null())
            rec.name = v.at("name").get<std::string>();
        if (v.contains("created_on") && !v.at("created_on").is_null())
            rec.created_on = parse_timestamp(v.at("created_on").get<std::string>());
        reg.add(rec);
    }
    return reg;
}

FakeRegistry FakeRegistry::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open registry: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string FakeRegistry::to_json() const {
    json j = json::object();
    for (const auto& [domain, rec] : by_domain_) {
        json e = json::object();
        if (rec.email) e["email"] = *rec.email;
        if (rec.name) e["name"] = *rec.name;
        if (rec.created_on) e["created_on"] = format_date(*rec.created_on);
        j[domain] = std::move(e);
    }
    return j.dump(2);
}

void FakeRegistry::add(const RegistrantRecord& record) { by_domain_[record.domain] = record; }

std::optional<RegistrantRecord> FakeRegistry::lookup(const std::string& domain) {
    auto it = by_domain_.find(domain);
    if (it == by_domain_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::vector<std::string>> FakeRegistry::domains_registered_by(
    const std::string& email) {
    std::vector<std::string> out;
    for (const auto& [domain, rec] : by_domain_)
        if (rec.email && *rec.email == email) out.push_back(domain);
    return out;
}

std::optional<RegistrantRecord> lookup_registrant(const std::string& domain,
                                                  WhoisProvider& provider, int max_attempts,
                                                  std::function<void(int)> backoff) {
    const std::string key = registrable_domain(domain);
    for (int attempt = 1;; ++attempt) {
        try {
            return provider.lookup(key);
        } catch (const ProviderUnavailable&) {
            if (attempt >= max_attempts) throw;
            if (backoff) backoff(attempt);
        }
    }
}

// ---------------------------------------------------------------------------
// campaigns

CampaignMapping map_campaigns(const std::vector<BotGroup>& botnets,
                              const std::map<std::string, ResolvedUrl>& resolutions,
                              WhoisProvider& whois, const CampaignOptions& opts) {
    CampaignMapping out;
    std::map<std::string, Campaign> by_email;
    std::map<std::string, std::set<AccountId>> members_by_email;

    for (const BotGroup& bn : botnets) {
        std::vector<std::string> urls;
        if (opts.use_all_urls)
            urls.assign(bn.embedded_urls.begin(), bn.embedded_urls.end());
        else if (!bn.dominant_url.empty())
            urls.push_back(bn.dominant_url);

        bool any_malicious = false;
        bool any_unknown = false;
        std::set<std::string> emails_hit;
        for (const std::string& u : urls) {
            auto res_it = resolutions.find(u);
            if (res_it == resolutions.end()) continue;
            const ResolvedUrl& res = res_it->second;
            if (res.status != ResolutionStatus::Resolved) continue;
            if (!(res.is_phishing || res.has_secret_url)) continue;
            any_malicious = true;

            std::string landing_domain = registrable_domain(res.final_url.host());
            auto rec = lookup_registrant(landing_domain, whois);
            if (!rec || !rec->email) {
                any_unknown = true;
                continue;
            }
            emails_hit.insert(*rec->email);
            Campaign& c = by_email[*rec->email];
            c.registrant_email = *rec->email;
            if (rec->name && !c.registrant_name) c.registrant_name = rec->name;
            c.domains.insert(landing_domain);
            c.botnets.insert(bn.group_id);
            members_by_email[*rec->email].insert(bn.members.begin(), bn.members.end());
        }
        if (!any_malicious)
            out.benign.push_back(bn.group_id);
        else if (emails_hit.empty() && any_unknown)
            out.unknown_registrant.push_back(bn.group_id);
    }

    for (auto& [email, c] : by_email) {
        if (auto all = whois.domains_registered_by(email))
            for (const std::string& d : *all) c.domains.insert(d);
        c.total_accounts = members_by_email[email].size();
        out.campaigns.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------------------
// blacklist

const char* blacklist_kind_name(BlacklistKind k) {
    switch (k) {
        case BlacklistKind::Email: return "email";
        case BlacklistKind::UrlDomain: return "url";
        case BlacklistKind::Account: return "account";
    }
    return "?";
}

std::vector<BlacklistEntry> Blacklist::upsert(const BlacklistEntry& entry) {
    auto key = std::make_pair(static_cast<int>(entry.kind), entry.value);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        entries_.emplace(key, entry);
        return {entry};
    }
    BlacklistEntry merged = it->second;
    merged.evidence.insert(entry.evidence.begin(), entry.evidence.end());
    merged.first_seen = std::min(merged.first_seen, entry.first_seen);
    merged.last_seen = std::max(merged.last_seen, entry.last_seen);
    bool changed = merged.evidence != it->second.evidence ||
                   merged.first_seen != it->second.first_seen ||
                   merged.last_seen != it->second.last_seen;
    if (!changed) return {};
    it->second = merged;
    return {merged};
}

std::optional<BlacklistEntry> Blacklist::find(BlacklistKind kind, const std::string& value) const {
    auto it = entries_.find(std::make_pair(static_cast<int>(kind), value));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string Blacklist::export_json_lines() const {
    std::string out;
    for (const auto& [key, e] : entries_) {
        json j;
        j["kind"] = blacklist_kind_name(e.kind);
        j["value"] = e.value;
        j["evidence"] = std::vector<std::string>(e.evidence.begin(), e.evidence.end());
        j["first_seen"] = format_timestamp(e.first_seen);
        j["last_seen"] = format_timestamp(e.last_seen);
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<BlacklistEntry> update_blacklist(Blacklist& store,
                                             const std::vector<Campaign>& campaigns,
                                             const std::map<std::string, BotGroup>& botnets_by_id,
                                             Timestamp now) {
    std::vector<BlacklistEntry> changed;
    auto apply = [&](BlacklistKind kind, const std::string& value,
                     const std::set<std::string>& evidence) {
        BlacklistEntry e{kind, value, evidence, now, now};
        auto delta = store.upsert(e);
        changed.insert(changed.end(), delta.begin(), delta.end());
    };

    for (const Campaign& c : campaigns) {
        apply(BlacklistKind::Email, c.registrant_email, c.botnets);
        for (const std::string& d : c.domains) apply(BlacklistKind::UrlDomain, d, c.botnets);
        for (const std::string& gid : c.botnets) {
            auto it = botnets_by_id.find(gid);
            if (it == botnets_by_id.end()) continue;
            for (const AccountId& a : it->second.members)
                apply(BlacklistKind::Account, a, {gid});
        }
    }
    return changed;
}

}  // namespace spamwatch
