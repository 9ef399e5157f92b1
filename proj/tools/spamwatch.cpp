#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spamwatch/api.hpp"
#include "spamwatch/pipeline.hpp"
#include "spamwatch/synth.hpp"

using namespace spamwatch;
using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};
void handle_signal(int) { g_stop.store(true); }

int fail(const std::string& message) {
    std::cerr << json{{"error", message}}.dump() << "\n";
    return 1;
}

// "2..6" (step 1) or "0.3..0.9:0.1"; a bare number is a single-point range.
template <typename T>
std::vector<T> parse_range(const std::string& text, T default_step) {
    auto dots = text.find("..");
    if (dots == std::string::npos) return {static_cast<T>(std::stod(text))};
    double lo = std::stod(text.substr(0, dots));
    std::string rest = text.substr(dots + 2);
    double step = static_cast<double>(default_step);
    auto colon = rest.find(':');
    if (colon != std::string::npos) {
        step = std::stod(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
    }
    double hi = std::stod(rest);
    if (step <= 0) throw std::runtime_error("range step must be positive: " + text);
    std::vector<T> out;
    for (double v = lo; v <= hi + step * 1e-9; v += step)
        out.push_back(static_cast<T>(std::is_integral_v<T> ? std::llround(v) : v));
    if (out.empty()) throw std::runtime_error("empty range: " + text);
    return out;
}

json report_json(const ReplayResult& result, const std::string& keyword,
                 const DetectionParams& params) {
    json groups = json::array();
    for (const BotGroup& g : result.detection.groups) {
        json j = botnet_to_json(g);
        j.erase("accounts");
        groups.push_back(std::move(j));
    }
    return json{{"keyword", keyword},
                {"alpha", params.min_duplicate_factor},
                {"beta", params.overlap_ratio},
                {"min_group_size", params.min_group_size},
                {"tweets", result.tweet_count},
                {"parse_errors", result.parse_errors},
                {"bot_traffic_percent", result.bot_traffic_percent},
                {"groups", std::move(groups)}};
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"botnet and spam-campaign detection pipeline"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "monitor + scheduler + detection + API");
    std::string run_config;
    run->add_option("--config", run_config, "pipeline config JSON")->required();

    // replay
    auto* replay = app.add_subcommand("replay", "one-shot detection over a file");
    std::string rp_input, rp_keyword = "http";
    DetectionParams rp_params;
    unsigned rp_workers = 4;
    bool rp_pretty = false;
    replay->add_option("--input", rp_input, "tweet JSON-lines file")->required();
    replay->add_option("--keyword", rp_keyword, "collection keyword (default http)");
    replay->add_option("--alpha", rp_params.min_duplicate_factor, "minimum duplicate factor");
    replay->add_option("--beta", rp_params.overlap_ratio, "overlap ratio");
    replay->add_option("--min-group-size", rp_params.min_group_size, "duplicate group threshold");
    replay->add_option("--timeline-depth", rp_params.timeline_depth, "timeline depth");
    replay->add_flag("--strip-urls", rp_params.strip_urls_before_hash,
                     "drop URLs from texts before hashing");
    replay->add_option("--workers", rp_workers, "detection parallelism");
    replay->add_flag("--pretty", rp_pretty, "indent the report");

    // resolve
    auto* resolve = app.add_subcommand("resolve", "follow redirects and classify one URL");
    std::string rs_url, rs_webspec;
    ResolverOptions rs_opts;
    resolve->add_option("url", rs_url, "URL to resolve")->required();
    resolve->add_option("--web-spec", rs_webspec, "scripted synthetic web (default: real network)");
    resolve->add_option("--max-retry", rs_opts.max_retry, "server-side redirect budget");
    resolve->add_flag("--all-3xx", rs_opts.follow_all_3xx, "continue on any 3xx, not only 301");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep with elbow report");
    std::string sw_input, sw_keyword = "http", sw_alpha = "2..6", sw_beta = "0.3..0.9:0.1";
    std::string sw_csv = "sweep.csv", sw_elbow = "sweep_elbow.json";
    DetectionParams sw_params;
    sweep_cmd->add_option("--input", sw_input, "tweet JSON-lines file")->required();
    sweep_cmd->add_option("--keyword", sw_keyword, "collection keyword");
    sweep_cmd->add_option("--alpha", sw_alpha, "factor range, e.g. 2..6");
    sweep_cmd->add_option("--beta", sw_beta, "ratio range, e.g. 0.3..0.9:0.1");
    sweep_cmd->add_option("--min-group-size", sw_params.min_group_size, "group threshold");
    sweep_cmd->add_option("--out-csv", sw_csv, "CSV output path");
    sweep_cmd->add_option("--out-elbow", sw_elbow, "elbow JSON output path");

    // generate
    auto* generate = app.add_subcommand("generate", "emit a synthetic world");
    std::string gn_scenario, gn_preset, gn_out;
    generate->add_option("--scenario", gn_scenario, "scenario JSON file");
    generate->add_option("--preset", gn_preset, "built-in scenario: default, fraction30, linkfarm, sweep, straddle");
    generate->add_option("--out", gn_out, "output directory")->required();

    // serve
    auto* serve = app.add_subcommand("serve", "API over an existing store");
    std::string sv_store;
    int sv_port = 18000;
    serve->add_option("--store", sv_store, "store JSON-lines path")->required();
    serve->add_option("--port", sv_port, "API port (0 picks a free one)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return 2;
    }

    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);

    try {
        if (*replay) {
            ReplayOptions opts;
            opts.params = rp_params;
            opts.keyword = rp_keyword;
            opts.workers = rp_workers;
            ReplayResult result = replay_detect(rp_input, opts);
            json rep = report_json(result, rp_keyword, rp_params);
            std::cout << (rp_pretty ? rep.dump(2) : rep.dump()) << "\n";
            return 0;
        }

        if (*resolve) {
            Url url = extract_netloc(rs_url);
            std::unique_ptr<ScriptedWeb> web;
            std::unique_ptr<HttpClient> http;
            if (!rs_webspec.empty()) {
                web = std::make_unique<ScriptedWeb>(WebSpec::load(rs_webspec));
                http = std::make_unique<ScriptedHttpClient>(*web);
            } else {
                http = std::make_unique<HttplibHttpClient>();
            }
            RedirectNavigator nav(*http);
            ResolvedUrl resolved = classify_url(url, *http, nav, rs_opts);
            std::cout << resolved.to_json() << "\n";
            return 0;
        }

        if (*sweep_cmd) {
            auto stream = open_stream(sw_input, sw_keyword);
            std::vector<Tweet> batch =
                collect_n(*stream, std::numeric_limits<std::size_t>::max());
            if (batch.empty()) return fail("no tweets matched keyword " + sw_keyword);
            ArchiveTimelineProvider provider(batch, sw_params);
            auto alphas = parse_range<int>(sw_alpha, 1);
            auto betas = parse_range<double>(sw_beta, 0.1);
            SweepReport report = sweep(batch, provider, alphas, betas, sw_params);
            write_text(sw_csv, report.to_csv());
            write_text(sw_elbow, report.elbow_json());
            std::cout << report.elbow_json() << "\n";
            return 0;
        }

        if (*generate) {
            if (gn_scenario.empty() == gn_preset.empty())
                return fail("give exactly one of --scenario or --preset");
            ScenarioSpec spec =
                gn_scenario.empty() ? preset_scenario(gn_preset) : ScenarioSpec::load(gn_scenario);
            SyntheticWorld world = generate_world(spec);
            write_world(world, spec, gn_out);
            std::cout << json{{"out", gn_out},
                              {"tweets", world.stream.size()},
                              {"accounts", world.accounts.size()},
                              {"bots", world.truth.all_bots.size()}}
                             .dump()
                      << "\n";
            return 0;
        }

        if (*serve) {
            DetectionStore store(sv_store);
            ApiServer api(store);
            int port = api.start(sv_port);
            std::cout << json{{"event", "api_ready"}, {"port", port},
                              {"groups", store.group_count()}}
                             .dump()
                      << std::endl;
            while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
            api.stop();
            return 0;
        }

        if (*run) {
            PipelineConfig config = PipelineConfig::load(run_config);
            RunPipeline pipeline(config);
            if (config.clock_mode == "wall") {
                ApiServer api(pipeline.store());
                int port = api.start(config.api_port);
                std::cout << json{{"event", "api_ready"}, {"port", port}}.dump() << std::endl;
                pipeline.run_wall(g_stop);
                api.stop();
                return 0;
            }
            pipeline.process_stream();
            const auto& c = pipeline.counters();
            ApiServer api(pipeline.store());
            int port = api.start(config.api_port);
            std::cout << json{{"event", "api_ready"},
                              {"port", port},
                              {"tweets", c.tweets_seen},
                              {"parse_errors", c.parse_errors},
                              {"triggers", c.triggers_fired},
                              {"jobs", c.jobs_run},
                              {"groups", pipeline.store().group_count()}}
                             .dump()
                      << std::endl;
            while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
            api.stop();
            return 0;
        }
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    return 2;
}
