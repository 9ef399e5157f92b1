#pragma once

#include <string>
#include <vector>

#include "spamwatch/detector.hpp"
#include "spamwatch/resolver.hpp"

namespace spamwatch {

struct KeywordJobConfig {
    std::string keyword;
    double interval_hours = 24;
    std::size_t tweets_per_run = 30000;
};

// One JSON document drives everything; every deployed parameter of the
// pipeline (top_k=15, window 60 min, group threshold 20, timeline depth 200,
// alpha=3, beta=0.6, max_retry=5) has a key here with that default.
struct PipelineConfig {
    std::string stream_uri;
    std::string stream_keyword = "http";
    std::vector<KeywordJobConfig> keywords;  // default: the seven most active
                                             // URL shorteners, every 24h
    int top_k = 15;
    int window_minutes = 60;
    std::string whitelist_path;

    DetectionParams detection;

    ResolverOptions resolver;
    int per_hop_timeout_seconds = 10;
    int total_budget_seconds = 60;
    std::string web_spec_path;  // "" = resolve against the real network

    std::string registry_path;  // "" = registrant lookups all come back empty

    std::string store_path = "store.jsonl";
    int api_port = 18000;
    std::string clock_mode = "simulated";  // or "wall"
    unsigned workers = 4;
    bool campaign_use_all_urls = false;

    static PipelineConfig defaults();
    static PipelineConfig from_json(const std::string& json_text,
                                    const std::string& base_dir = "");
    // Relative paths in the file resolve against the config file's directory.
    static PipelineConfig load(const std::string& path);
    std::string to_json() const;
};

}  // namespace spamwatch
