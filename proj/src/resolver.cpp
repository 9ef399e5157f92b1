#include "spamwatch/resolver.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace spamwatch {

using nlohmann::json;

// ---------------------------------------------------------------------------
// web spec

WebSpec WebSpec::from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    WebSpec spec;
    for (const auto& r : j.at("rules")) {
        WebRule rule;
        rule.pattern = r.at("pattern").get<std::string>();
        if (r.contains("server_redirect")) {
            rule.kind = WebRule::Kind::ServerRedirect;
            rule.target = r.at("server_redirect").get<std::string>();
        } else if (r.contains("client_redirect")) {
            rule.kind = WebRule::Kind::ClientRedirect;
            rule.target = r.at("client_redirect").get<std::string>();
        } else {
            rule.kind = WebRule::Kind::Page;
            rule.target = r.value("page", "");
        }
        spec.rules.push_back(std::move(rule));
    }
    return spec;
}

WebSpec WebSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open web spec: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string WebSpec::to_json() const {
    json rules = json::array();
    for (const auto& r : this->rules) {
        json e;
        e["pattern"] = r.pattern;
        switch (r.kind) {
            case WebRule::Kind::ServerRedirect: e["server_redirect"] = r.target; break;
            case WebRule::Kind::ClientRedirect: e["client_redirect"] = r.target; break;
            case WebRule::Kind::Page: e["page"] = r.target; break;
        }
        rules.push_back(std::move(e));
    }
    json j;
    j["rules"] = std::move(rules);
    return j.dump(2);
}

ScriptedWeb::ScriptedWeb(WebSpec spec) : spec_(std::move(spec)) {}

namespace {

std::string match_key(const Url& url) {
    return url.netloc + (url.path.empty() ? "/" : url.path);
}

std::string client_redirect_page(const std::string& target) {
    return "<html><head><meta http-equiv=\"refresh\" content=\"0;url=" + target +
           "\"></head><body></body></html>";
}

}  // namespace

const WebRule* ScriptedWeb::match(const Url& url) const {
    const std::string key = match_key(url);
    const WebRule* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& r : spec_.rules) {
        if (r.pattern.empty()) continue;
        if (r.pattern.back() == '*') {
            std::string prefix = r.pattern.substr(0, r.pattern.size() - 1);
            if (key.rfind(prefix, 0) == 0 && (!best || prefix.size() >= best_len)) {
                // exact matches beat wildcards regardless of length
                if (best && best_len == std::string::npos) continue;
                best = &r;
                best_len = prefix.size();
            }
        } else if (r.pattern == key) {
            best = &r;
            best_len = std::string::npos;  // exact: unbeatable
        }
    }
    return best;
}

HttpResponse ScriptedWeb::serve(const Url& url) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        hop_log_.push_back(url.full());
    }
    HttpResponse resp;
    resp.ok = true;
    resp.url = url.full();
    const WebRule* rule = match(url);
    if (!rule) {
        resp.status = 404;
        resp.body = "not found";
        return resp;
    }
    switch (rule->kind) {
        case WebRule::Kind::ServerRedirect:
            resp.status = 301;
            resp.location = rule->target;
            break;
        case WebRule::Kind::ClientRedirect:
            resp.status = 200;
            resp.body = client_redirect_page(rule->target);
            break;
        case WebRule::Kind::Page:
            resp.status = 200;
            resp.body = rule->target;
            break;
    }
    return resp;
}

std::vector<std::string> ScriptedWeb::hop_log() const {
    std::lock_guard<std::mutex> lock(mu_);
    return hop_log_;
}

void ScriptedWeb::clear_hop_log() {
    std::lock_guard<std::mutex> lock(mu_);
    hop_log_.clear();
}

// ---------------------------------------------------------------------------
// real client

HttplibHttpClient::HttplibHttpClient(std::map<std::string, std::string> host_routes,
                                     int per_hop_timeout_seconds)
    : host_routes_(std::move(host_routes)), timeout_(per_hop_timeout_seconds) {}

HttpResponse HttplibHttpClient::get(const Url& url) {
    HttpResponse out;
    out.url = url.full();

    std::string origin = url.scheme + "://" + url.netloc;
    auto route = host_routes_.find(url.netloc);
    if (route != host_routes_.end()) origin = "http://" + route->second;

    httplib::Client cli(origin);
    cli.set_follow_location(false);
    cli.set_connection_timeout(timeout_, 0);
    cli.set_read_timeout(timeout_, 0);

    httplib::Headers headers{{"Host", url.netloc}};
    std::string target = url.path.empty() ? "/" : url.path;
    if (!url.query.empty()) target += "?" + url.query;

    auto res = cli.Get(target, headers);
    if (!res) {
        out.ok = false;
        out.error = httplib::to_string(res.error());
        return out;
    }
    out.ok = true;
    out.status = res->status;
    out.body = res->body;
    if (res->has_header("Location")) out.location = res->get_header_value("Location");
    return out;
}

// ---------------------------------------------------------------------------
// navigation

std::optional<std::string> find_meta_refresh(const std::string& body) {
    std::string low;
    low.reserve(body.size());
    std::transform(body.begin(), body.end(), std::back_inserter(low),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    auto pos = low.find("http-equiv=\"refresh\"");
    if (pos == std::string::npos) pos = low.find("http-equiv='refresh'");
    if (pos == std::string::npos) return std::nullopt;
    auto url_pos = low.find("url=", pos);
    if (url_pos == std::string::npos) return std::nullopt;
    auto start = url_pos + 4;
    auto end = body.find_first_of("\"'> ", start);
    if (end == std::string::npos) end = body.size();
    std::string target = body.substr(start, end - start);
    if (target.empty()) return std::nullopt;
    return target;
}

std::optional<Url> RedirectNavigator::navigate(const Url& url) {
    Url current = url;
    for (int hop = 0; hop < max_hops_; ++hop) {
        HttpResponse resp = http_.get(current);
        if (!resp.ok) return std::nullopt;
        if (resp.status >= 300 && resp.status < 400 && !resp.location.empty()) {
            current = resolve_reference(current, resp.location);
            continue;
        }
        if (auto target = find_meta_refresh(resp.body)) {
            current = resolve_reference(current, *target);
            continue;
        }
        return current;
    }
    return current;  // hop cap: report where we stopped
}

// ---------------------------------------------------------------------------
// web server

struct WebServer::Impl {
    httplib::Server server;
    std::thread thread;
};

WebServer::WebServer(ScriptedWeb& web) : impl_(std::make_unique<Impl>()), web_(web) {}

WebServer::~WebServer() { stop(); }

int WebServer::start() {
    impl_->server.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
        std::string host = req.get_header_value("Host");
        auto colon = host.rfind(':');
        // strip the local port a raw client leaks in; synthetic hosts carry none
        if (colon != std::string::npos &&
            host.compare(0, colon, "127.0.0.1") == 0)
            host = host.substr(0, colon);
        Url url;
        url.scheme = "http";
        url.netloc = host;
        url.path = req.path;
        url.raw = url.full();
        HttpResponse scripted = web_.serve(url);
        res.status = scripted.status;
        if (!scripted.location.empty()) res.set_header("Location", scripted.location);
        res.set_content(scripted.body, "text/html");
    });
    port_ = impl_->server.bind_to_any_port("127.0.0.1");
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port_;
}

void WebServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
    if (impl_ && impl_->thread.joinable()) impl_->thread.join();
}

// ---------------------------------------------------------------------------
// resolution

RedirectOutcome follow_redirects(const Url& top_url, HttpClient& http,
                                 const ResolverOptions& opts) {
    RedirectOutcome out;
    out.final_url = top_url;
    Url current = top_url;
    int last_status = 301;  // the loop's entry condition
    while (last_status == 301 ||
           (opts.follow_all_3xx && last_status >= 300 && last_status < 400)) {
        if (out.num_retries >= opts.max_retry) break;
        HttpResponse resp = http.get(current);
        ++out.num_retries;
        if (!resp.ok) {
            out.chain.emplace_back(current.full(), 0);
            out.failed = true;
            out.error = resp.error;
            out.final_url = current;
            return out;
        }
        out.chain.emplace_back(current.full(), resp.status);
        last_status = resp.status;
        bool redirect = resp.status == 301 ||
                        (opts.follow_all_3xx && resp.status >= 300 && resp.status < 400);
        if (redirect && !resp.location.empty()) {
            current = resolve_reference(current, resp.location);
        }
        out.final_url = current;
    }
    return out;
}

ResolvedUrl classify_url(const Url& top_url, HttpClient& http, NavigationClient& nav,
                         const ResolverOptions& opts) {
    ResolvedUrl out;
    out.input_url = top_url.full();

    RedirectOutcome redirects = follow_redirects(top_url, http, opts);
    out.chain = std::move(redirects.chain);
    out.final_url = redirects.final_url;
    out.num_retries = redirects.num_retries;
    if (out.chain.empty()) out.chain.emplace_back(top_url.full(), 0);
    if (redirects.failed) {
        out.status = ResolutionStatus::Failed;
        out.error = redirects.error;
        return out;
    }

    Url bare = extract_netloc(out.final_url.netloc_only());
    auto landed_bare = nav.navigate(bare);
    auto landed_full = nav.navigate(out.final_url);
    if (!landed_bare || !landed_full) {
        out.status = ResolutionStatus::Indeterminate;
        out.error = "navigation failed";
        return out;
    }
    out.has_secret_url = landed_bare->netloc != landed_full->netloc;
    out.is_phishing = landed_bare->netloc != out.final_url.netloc ||
                      landed_full->netloc != out.final_url.netloc;
    out.status = ResolutionStatus::Resolved;
    return out;
}

std::string ResolvedUrl::to_json() const {
    json j;
    j["input_url"] = input_url;
    json chain_json = json::array();
    for (const auto& [url, status] : chain) chain_json.push_back({{"url", url}, {"status", status}});
    j["chain"] = std::move(chain_json);
    j["final_url"] = final_url.full();
    j["has_secret_url"] = has_secret_url;
    j["is_phishing"] = is_phishing;
    j["num_retries"] = num_retries;
    switch (status) {
        case ResolutionStatus::Resolved: j["status"] = "resolved"; break;
        case ResolutionStatus::Failed: j["status"] = "failed"; break;
        case ResolutionStatus::Indeterminate: j["status"] = "indeterminate"; break;
    }
    if (!error.empty()) j["error"] = error;
    return j.dump();
}

}  // namespace spamwatch
