#pragma once

#include <atomic>
#include <functional>
#include <memory>

#include "spamwatch/campaign.hpp"
#include "spamwatch/config.hpp"
#include "spamwatch/detector.hpp"
#include "spamwatch/ingest.hpp"
#include "spamwatch/scheduler.hpp"
#include "spamwatch/store.hpp"
#include "spamwatch/trend.hpp"

namespace spamwatch {

struct ReplayOptions {
    DetectionParams params;
    std::string keyword = "http";
    std::size_t max_tweets = std::numeric_limits<std::size_t>::max();
    unsigned workers = 1;
};

struct ReplayResult {
    BatchDetection detection;
    std::size_t tweet_count = 0;
    std::size_t parse_errors = 0;
    double bot_traffic_percent = 0.0;
};

// One-shot detection over a replayable source: collect everything matching
// the keyword, detect with timelines served from the same archive.
ReplayResult replay_detect(const std::string& uri, const ReplayOptions& opts);

// The full chain wired together: monitor -> scheduler -> detector ->
// resolver -> campaign mapper -> store. In simulated mode the clock is the
// replayed stream's own timestamps and due jobs fire at UTC day boundaries;
// in wall mode jobs poll real time and collect from a fresh stream each run.
class RunPipeline {
public:
    explicit RunPipeline(const PipelineConfig& config);
    ~RunPipeline();

    // Replays the configured source to exhaustion (simulated clock).
    void process_stream();

    // Wall-clock loop; returns when `stop` becomes true.
    void run_wall(const std::atomic<bool>& stop);

    DetectionStore& store() { return *store_; }
    const PipelineConfig& config() const { return config_; }

    struct Counters {
        std::size_t tweets_seen = 0;
        std::size_t parse_errors = 0;
        std::size_t triggers_fired = 0;
        std::size_t duplicate_triggers = 0;
        std::size_t jobs_run = 0;
        std::size_t botnets_recorded = 0;
    };
    const Counters& counters() const { return counters_; }

private:
    void run_job_batch(const Job& job, const std::vector<Tweet>& batch,
                       TimelineProvider& provider, Timestamp now);
    void map_and_record_campaigns(Timestamp now);
    std::unique_ptr<HttpClient> make_http_client();

    PipelineConfig config_;
    std::unique_ptr<DetectionStore> store_;
    std::unique_ptr<TrendWindow> monitor_;
    Schedule schedule_;
    std::unique_ptr<ScriptedWeb> scripted_web_;   // when web_spec configured
    std::unique_ptr<FakeRegistry> registry_;      // when registry configured
    std::map<std::string, ResolvedUrl> resolutions_;
    std::vector<BotGroup> all_botnets_;           // cumulative, by first sight
    std::map<std::string, BotGroup> botnets_by_id_;
    Counters counters_;
};

}  // namespace spamwatch
