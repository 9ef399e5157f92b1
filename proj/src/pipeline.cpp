#include "spamwatch/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

namespace spamwatch {

ReplayResult replay_detect(const std::string& uri, const ReplayOptions& opts) {
    ReplayResult result;
    auto stream = open_stream(uri, opts.keyword);
    std::vector<Tweet> batch = collect_n(*stream, opts.max_tweets);
    result.tweet_count = batch.size();
    result.parse_errors = stream->parse_errors();
    if (batch.empty()) return result;

    ArchiveTimelineProvider provider(batch, opts.params);
    Timestamp detected_at = batch.back().created_at;
    result.detection = detect_batch(batch, opts.keyword, provider, opts.params, detected_at,
                                    opts.workers);
    result.bot_traffic_percent = bot_traffic_fraction(batch, result.detection.bots);
    return result;
}

// ---------------------------------------------------------------------------

RunPipeline::RunPipeline(const PipelineConfig& config) : config_(config) {
    store_ = std::make_unique<DetectionStore>(config_.store_path);
    std::set<std::string> whitelist;
    if (!config_.whitelist_path.empty()) whitelist = load_whitelist(config_.whitelist_path);
    monitor_ = std::make_unique<TrendWindow>(config_.top_k, config_.window_minutes,
                                             std::move(whitelist));
    if (!config_.web_spec_path.empty())
        scripted_web_ = std::make_unique<ScriptedWeb>(WebSpec::load(config_.web_spec_path));
    if (!config_.registry_path.empty())
        registry_ = std::make_unique<FakeRegistry>(FakeRegistry::load(config_.registry_path));
}

RunPipeline::~RunPipeline() = default;

std::unique_ptr<HttpClient> RunPipeline::make_http_client() {
    if (scripted_web_) return std::make_unique<ScriptedHttpClient>(*scripted_web_);
    return std::make_unique<HttplibHttpClient>(std::map<std::string, std::string>{},
                                               config_.per_hop_timeout_seconds);
}

void RunPipeline::run_job_batch(const Job& job, const std::vector<Tweet>& batch,
                                TimelineProvider& provider, Timestamp now) {
    ++counters_.jobs_run;
    if (batch.empty()) return;

    BatchDetection detection = detect_batch(batch, job.keyword, provider, config_.detection, now,
                                            config_.workers);

    for (BotGroup& g : detection.groups) {
        store_->record(g);
        ++counters_.botnets_recorded;
        auto [it, inserted] = botnets_by_id_.emplace(g.group_id, g);
        if (inserted)
            all_botnets_.push_back(g);
        else
            it->second = g;
    }

    DailyStat stat;
    stat.date = format_date(batch.front().created_at);
    stat.keyword = job.keyword;
    stat.total_tweets = static_cast<std::int64_t>(batch.size());
    for (const Tweet& t : batch)
        if (detection.bots.count(t.author)) ++stat.bot_tweets;
    stat.fraction = bot_traffic_fraction(batch, detection.bots);
    store_->record(stat);

    // resolve each new dominant URL once; cache keyed on the full string
    auto http = make_http_client();
    RedirectNavigator nav(*http);
    ResolverOptions ropts = config_.resolver;
    for (const BotGroup& g : detection.groups) {
        if (g.dominant_url.empty() || resolutions_.count(g.dominant_url)) continue;
        auto url = try_extract_netloc(g.dominant_url);
        if (!url) continue;
        resolutions_.emplace(g.dominant_url, classify_url(*url, *http, nav, ropts));
    }
}

void RunPipeline::map_and_record_campaigns(Timestamp now) {
    if (!registry_ || all_botnets_.empty()) return;
    CampaignOptions copts;
    copts.use_all_urls = config_.campaign_use_all_urls;
    CampaignMapping mapping = map_campaigns(all_botnets_, resolutions_, *registry_, copts);
    for (const Campaign& c : mapping.campaigns) store_->record(c);
    auto changed = update_blacklist(store_->blacklist(), mapping.campaigns, botnets_by_id_, now);
    for (const BlacklistEntry& e : changed) store_->record(e);
}

void RunPipeline::process_stream() {
    auto stream = open_stream(config_.stream_uri, config_.stream_keyword);

    std::vector<Tweet> archive;   // everything seen, timeline source
    std::vector<Tweet> day_buffer;
    std::int64_t current_day = std::numeric_limits<std::int64_t>::min();
    Timestamp started_at = 0;
    bool schedule_initialized = false;

    ArchiveTimelineProvider provider(archive, config_.detection);

    auto flush_day = [&](Timestamp day_end) {
        if (day_buffer.empty()) return;
        // rebuild the provider so it sees everything up to the boundary
        provider = ArchiveTimelineProvider(archive, config_.detection);
        provider.set_as_of(day_end - 1);
        for (const Job& job : schedule_.due_jobs(day_end)) {
            std::vector<Tweet> batch;
            for (const Tweet& t : day_buffer)
                if (contains_keyword(t.text, job.keyword)) {
                    batch.push_back(t);
                    if (batch.size() >= job.tweets_per_run) break;
                }
            run_job_batch(job, batch, provider, day_end - 1);
        }
        map_and_record_campaigns(day_end - 1);
        day_buffer.clear();
    };

    while (auto t = stream->next()) {
        ++counters_.tweets_seen;
        if (!schedule_initialized) {
            // anchor configured jobs to the first day's midnight so a 24h
            // interval lands exactly on day boundaries
            started_at = (t->created_at / kSecondsPerDay) * kSecondsPerDay;
            for (const auto& k : config_.keywords)
                schedule_.add_configured(k.keyword,
                                         static_cast<std::int64_t>(k.interval_hours * 3600),
                                         k.tweets_per_run, started_at);
            schedule_initialized = true;
        }

        std::int64_t day = t->created_at / kSecondsPerDay;
        if (day != current_day) {
            if (current_day != std::numeric_limits<std::int64_t>::min())
                flush_day((current_day + 1) * kSecondsPerDay);
            current_day = day;
        }

        for (const Trigger& trig : monitor_->observe(*t, t->created_at)) {
            ++counters_.triggers_fired;
            try {
                // trend keywords inherit the default cadence
                schedule_.add_keyword(trig, 24 * 3600, 30000);
            } catch (const DuplicateKeyword&) {
                ++counters_.duplicate_triggers;
            }
        }

        day_buffer.push_back(*t);
        archive.push_back(std::move(*t));
    }
    counters_.parse_errors = stream->parse_errors();
    if (current_day != std::numeric_limits<std::int64_t>::min())
        flush_day((current_day + 1) * kSecondsPerDay);
}

void RunPipeline::run_wall(const std::atomic<bool>& stop) {
    Timestamp now = static_cast<Timestamp>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
    for (const auto& k : config_.keywords)
        schedule_.add_configured(k.keyword, static_cast<std::int64_t>(k.interval_hours * 3600),
                                 k.tweets_per_run, now);

    // monitor thread: consume the live stream, feed the counter, add keywords
    std::atomic<bool> monitor_done{false};
    std::thread monitor_thread([&] {
        try {
            auto stream = open_stream(config_.stream_uri, config_.stream_keyword);
            while (!stop.load()) {
                auto t = stream->next();
                if (!t) break;
                ++counters_.tweets_seen;
                Timestamp tnow = static_cast<Timestamp>(
                    std::chrono::duration_cast<std::chrono::seconds>(
                        std::chrono::system_clock::now().time_since_epoch())
                        .count());
                for (const Trigger& trig : monitor_->observe(*t, tnow)) {
                    ++counters_.triggers_fired;
                    try {
                        schedule_.add_keyword(trig, 24 * 3600, 30000);
                    } catch (const DuplicateKeyword&) {
                        ++counters_.duplicate_triggers;
                    }
                }
            }
        } catch (const std::exception&) {
            // source went away; jobs keep polling
        }
        monitor_done.store(true);
    });

    while (!stop.load()) {
        Timestamp tick = static_cast<Timestamp>(
            std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count());
        for (const Job& job : schedule_.due_jobs(tick)) {
            try {
                auto stream = open_stream(config_.stream_uri, job.keyword);
                std::vector<Tweet> batch = collect_n(*stream, job.tweets_per_run);
                // live timelines are out of scope; the collected sample is
                // the archive the provider replays
                ArchiveTimelineProvider provider(batch, config_.detection);
                run_job_batch(job, batch, provider, tick);
            } catch (const SourceUnavailable&) {
            }
        }
        map_and_record_campaigns(tick);
        std::this_thread::sleep_for(std::chrono::seconds(1));
    }
    monitor_thread.join();
    (void)monitor_done;
}

}  // namespace spamwatch
