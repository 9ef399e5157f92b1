#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "spamwatch/core.hpp"

namespace spamwatch {

// One HTTP exchange. Redirects are never followed internally; the resolver
// loop owns that.
struct HttpResponse {
    bool ok = false;          // transport-level success
    int status = 0;           // 0 when !ok
    std::string url;          // the URL that was fetched
    std::string location;     // Location header, verbatim
    std::string body;
    std::string error;        // transport error text when !ok
};

class HttpClient {
public:
    virtual ~HttpClient() = default;
    virtual HttpResponse get(const Url& url) = 0;
};

// Final landing URL after client-side redirects, the browser's role.
class NavigationClient {
public:
    virtual ~NavigationClient() = default;
    virtual std::optional<Url> navigate(const Url& url) = 0;
};

// ---------------------------------------------------------------------------
// scripted synthetic web

// Declarative site behavior. Patterns are "netloc/path", matched against a
// request's netloc+path (path defaults to "/"); a trailing '*' makes the
// pattern a prefix. Exact matches win, then the longest wildcard.
struct WebRule {
    std::string pattern;
    enum class Kind { ServerRedirect, ClientRedirect, Page } kind = Kind::Page;
    std::string target;  // redirect target, or page content
};

struct WebSpec {
    std::vector<WebRule> rules;

    static WebSpec from_json(const std::string& json_text);
    static WebSpec load(const std::string& path);
    std::string to_json() const;
};

// Interprets a WebSpec: server_redirect -> 301 + Location, client_redirect
// -> 200 page carrying a meta-refresh hop, page -> 200, no match -> 404.
// Every served request lands in the hop log.
class ScriptedWeb {
public:
    explicit ScriptedWeb(WebSpec spec);

    HttpResponse serve(const Url& url);
    const WebRule* match(const Url& url) const;

    std::vector<std::string> hop_log() const;
    void clear_hop_log();

private:
    WebSpec spec_;
    mutable std::mutex mu_;
    std::vector<std::string> hop_log_;
};

// HttpClient over an in-process ScriptedWeb.
class ScriptedHttpClient : public HttpClient {
public:
    explicit ScriptedHttpClient(ScriptedWeb& web) : web_(web) {}
    HttpResponse get(const Url& url) override { return web_.serve(url); }

private:
    ScriptedWeb& web_;
};

// Real HTTP client (cpp-httplib), one GET per call, redirects not followed.
// `host_routes` maps a netloc to "ip:port" so synthetic hostnames can be
// served by a local server while keeping true Host semantics; empty means
// direct network access.
class HttplibHttpClient : public HttpClient {
public:
    explicit HttplibHttpClient(std::map<std::string, std::string> host_routes = {},
                               int per_hop_timeout_seconds = 10);
    HttpResponse get(const Url& url) override;

private:
    std::map<std::string, std::string> host_routes_;
    int timeout_;
};

// Browser stand-in: follows any 3xx Location and meta-refresh client hops
// until a plain page (or the hop cap) and reports where it ended up.
// Works identically over the scripted web or real HTTP.
class RedirectNavigator : public NavigationClient {
public:
    explicit RedirectNavigator(HttpClient& http, int max_hops = 20)
        : http_(http), max_hops_(max_hops) {}
    std::optional<Url> navigate(const Url& url) override;

private:
    HttpClient& http_;
    int max_hops_;
};

// Extracts the url= target of a meta-refresh tag, if any.
std::optional<std::string> find_meta_refresh(const std::string& body);

// Serves a ScriptedWeb over real HTTP on 127.0.0.1, matching rules by Host
// header + path. Redirect Locations are served verbatim, so pair it with an
// HttplibHttpClient whose host_routes point back at this server.
class WebServer {
public:
    explicit WebServer(ScriptedWeb& web);
    ~WebServer();
    int start();  // returns the bound port
    void stop();
    int port() const { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    ScriptedWeb& web_;
    int port_ = 0;
};

// ---------------------------------------------------------------------------
// resolution

enum class ResolutionStatus { Resolved, Failed, Indeterminate };

struct ResolvedUrl {
    std::string input_url;
    std::vector<std::pair<std::string, int>> chain;  // (fetched url, status)
    Url final_url;
    bool has_secret_url = false;
    bool is_phishing = false;
    int num_retries = 0;
    ResolutionStatus status = ResolutionStatus::Resolved;
    std::string error;

    std::string to_json() const;
};

struct ResolverOptions {
    int max_retry = 5;
    bool follow_all_3xx = false;  // default: only 301 continues the loop
};

struct RedirectOutcome {
    Url final_url;
    std::vector<std::pair<std::string, int>> chain;
    int num_retries = 0;
    bool failed = false;
    std::string error;
};

// The server-side redirect loop: GET while the last status is 301 (or any
// 3xx with follow_all_3xx) and retries remain, advancing to each Location.
RedirectOutcome follow_redirects(const Url& top_url, HttpClient& http,
                                 const ResolverOptions& opts);

// Full classification: resolve the chain, then navigate the bare netloc and
// the complete final URL and compare landing netlocs.
//   has_secret_url = landing(netloc-only) != landing(full)
//   is_phishing    = either landing differs from the resolved final netloc
// Navigation failure yields Indeterminate, never silently-false flags.
ResolvedUrl classify_url(const Url& top_url, HttpClient& http, NavigationClient& nav,
                         const ResolverOptions& opts = {});

}  // namespace spamwatch
