#include "spamwatch/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace spamwatch {

using nlohmann::json;
namespace fs = std::filesystem;

PipelineConfig PipelineConfig::defaults() {
    PipelineConfig c;
    for (const char* kw :
         {"bit.ly", "ift.tt", "ow.ly", "goo.gl", "tinyurl.com", "dlvr.it", "dld.bz"})
        c.keywords.push_back({kw, 24, 30000});
    return c;
}

namespace {

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty() || base_dir.empty()) return path;
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(base_dir) / p).string();
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const std::string& text, const std::string& base_dir) {
    json j = json::parse(text);
    PipelineConfig c = defaults();

    if (j.contains("stream")) {
        const json& s = j.at("stream");
        std::string uri = s.value("uri", "");
        // file uris resolve relative to the config; sockets pass through
        if (!uri.empty() && uri.rfind("tcp://", 0) != 0) {
            std::string path = uri.rfind("file:", 0) == 0 ? uri.substr(5) : uri;
            uri = resolve_path(base_dir, path);
        }
        c.stream_uri = uri;
        c.stream_keyword = s.value("keyword", "http");
    }
    if (j.contains("keywords")) {
        c.keywords.clear();
        for (const auto& k : j.at("keywords"))
            c.keywords.push_back({k.at("keyword").get<std::string>(),
                                  k.value("interval_hours", 24.0),
                                  k.value("tweets_per_run", std::size_t{30000})});
    }
    if (j.contains("monitor")) {
        const json& m = j.at("monitor");
        c.top_k = m.value("top_k", 15);
        c.window_minutes = m.value("window_minutes", 60);
        c.whitelist_path = resolve_path(base_dir, m.value("whitelist_path", ""));
    }
    if (j.contains("detection")) {
        const json& d = j.at("detection");
        c.detection.min_duplicate_factor = d.value("alpha", 3);
        c.detection.overlap_ratio = d.value("beta", 0.6);
        c.detection.min_group_size = d.value("min_group_size", std::size_t{20});
        c.detection.timeline_depth = d.value("timeline_depth", std::size_t{200});
        c.detection.strip_urls_before_hash = d.value("strip_urls_before_hash", false);
    }
    if (j.contains("resolver")) {
        const json& r = j.at("resolver");
        c.resolver.max_retry = r.value("max_retry", 5);
        c.resolver.follow_all_3xx = r.value("follow_all_3xx", false);
        c.per_hop_timeout_seconds = r.value("per_hop_timeout_seconds", 10);
        c.total_budget_seconds = r.value("total_budget_seconds", 60);
        c.web_spec_path = resolve_path(base_dir, r.value("web_spec", ""));
    }
    if (j.contains("whois"))
        c.registry_path = resolve_path(base_dir, j.at("whois").value("registry", ""));
    if (j.contains("store"))
        c.store_path = resolve_path(base_dir, j.at("store").value("path", "store.jsonl"));
    if (j.contains("api")) c.api_port = j.at("api").value("port", 18000);
    if (j.contains("clock")) c.clock_mode = j.at("clock").value("mode", "simulated");
    c.workers = j.value("workers", 4u);
    if (j.contains("campaign"))
        c.campaign_use_all_urls = j.at("campaign").value("use_all_urls", false);
    return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str(), fs::path(path).parent_path().string());
}

std::string PipelineConfig::to_json() const {
    json j;
    j["stream"] = {{"uri", stream_uri}, {"keyword", stream_keyword}};
    json kws = json::array();
    for (const auto& k : keywords)
        kws.push_back(json{{"keyword", k.keyword},
                           {"interval_hours", k.interval_hours},
                           {"tweets_per_run", k.tweets_per_run}});
    j["keywords"] = std::move(kws);
    j["monitor"] = {{"top_k", top_k},
                    {"window_minutes", window_minutes},
                    {"whitelist_path", whitelist_path}};
    j["detection"] = {{"alpha", detection.min_duplicate_factor},
                      {"beta", detection.overlap_ratio},
                      {"min_group_size", detection.min_group_size},
                      {"timeline_depth", detection.timeline_depth},
                      {"strip_urls_before_hash", detection.strip_urls_before_hash}};
    j["resolver"] = {{"max_retry", resolver.max_retry},
                     {"follow_all_3xx", resolver.follow_all_3xx},
                     {"web_spec", web_spec_path},
                     {"per_hop_timeout_seconds", per_hop_timeout_seconds},
                     {"total_budget_seconds", total_budget_seconds}};
    j["whois"] = {{"registry", registry_path}};
    j["store"] = {{"path", store_path}};
    j["api"] = {{"port", api_port}};
    j["clock"] = {{"mode", clock_mode}};
    j["workers"] = workers;
    j["campaign"] = {{"use_all_urls", campaign_use_all_urls}};
    return j.dump(2);
}

}  // namespace spamwatch
