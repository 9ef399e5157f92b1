#include "spamwatch/api.hpp"

#include <thread>

#include <httplib.h>

namespace spamwatch {

using nlohmann::json;

namespace {

struct BadQuery : std::runtime_error {
    explicit BadQuery(const std::string& what) : std::runtime_error(what) {}
};

std::size_t parse_count(const httplib::Request& req, const char* name, std::size_t fallback,
                        std::size_t max) {
    if (!req.has_param(name)) return fallback;
    const std::string v = req.get_param_value(name);
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw BadQuery(std::string(name) + " must be a non-negative integer");
    std::size_t n = std::stoull(v);
    return std::min(n, max);
}

void send_json(httplib::Response& res, int status, const json& j) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, json{{"error", message}});
}

// Shared list envelope: {total, limit, offset, items}.
void send_page(httplib::Response& res, const httplib::Request& req, std::vector<json> items,
               const char* items_key) {
    std::size_t limit = parse_count(req, "limit", 100, 1000);
    std::size_t offset = parse_count(req, "offset", 0, std::numeric_limits<std::size_t>::max());
    json page = json::array();
    for (std::size_t i = offset; i < items.size() && page.size() < limit; ++i)
        page.push_back(std::move(items[i]));
    json j;
    j["total"] = items.size();
    j["limit"] = limit;
    j["offset"] = offset;
    j[items_key] = std::move(page);
    send_json(res, 200, j);
}

bool valid_date_param(const std::string& s) { return parse_date(s).has_value(); }

}  // namespace

struct ApiServer::Impl {
    httplib::Server server;
    std::thread thread;
};

ApiServer::ApiServer(const DetectionStore& store)
    : impl_(std::make_unique<Impl>()), store_(store) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::start(int port) {
    auto& s = impl_->server;
    const DetectionStore& store = store_;

    auto guarded = [](auto fn) {
        return [fn](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const BadQuery& e) {
                send_error(res, 400, e.what());
            } catch (const std::exception& e) {
                send_error(res, 500, e.what());
            }
        };
    };

    s.Get("/api/health", guarded([&store](const httplib::Request&, httplib::Response& res) {
              send_json(res, 200, json{{"status", "ok"}, {"groups", store.group_count()}});
          }));

    s.Get("/api/groups", guarded([&store](const httplib::Request& req, httplib::Response& res) {
              std::string keyword = req.get_param_value("keyword");
              std::string date = req.get_param_value("date");
              if (!date.empty() && !valid_date_param(date))
                  throw BadQuery("date must be YYYY-MM-DD");
              send_page(res, req, store.groups(keyword, date), "groups");
          }));

    s.Get("/api/groups/([^/]+)/accounts",
          guarded([&store](const httplib::Request& req, httplib::Response& res) {
              const std::string id = req.matches[1];
              if (!store.group_by_id(id)) {
                  send_error(res, 404, "unknown group: " + id);
                  return;
              }
              std::vector<json> items;
              for (const Account& a : store.accounts_of_group(id))
                  items.push_back(account_to_json(a));
              send_page(res, req, std::move(items), "accounts");
          }));

    s.Get("/api/groups/([^/]+)",
          guarded([&store](const httplib::Request& req, httplib::Response& res) {
              const std::string id = req.matches[1];
              auto g = store.group_by_id(id);
              if (!g) {
                  send_error(res, 404, "unknown group: " + id);
                  return;
              }
              send_json(res, 200, *g);
          }));

    s.Get("/api/campaigns", guarded([&store](const httplib::Request& req, httplib::Response& res) {
              send_page(res, req, store.campaigns(), "campaigns");
          }));

    s.Get("/api/campaigns/([^/]+)",
          guarded([&store](const httplib::Request& req, httplib::Response& res) {
              std::string email = req.matches[1];
              auto c = store.campaign_by_email(email);
              if (!c) {
                  send_error(res, 404, "unknown campaign: " + email);
                  return;
              }
              send_json(res, 200, *c);
          }));

    s.Get("/api/blacklist", guarded([&store](const httplib::Request& req, httplib::Response& res) {
              send_page(res, req, store.blacklist_entries(), "entries");
          }));

    s.Get("/api/stats/daily", guarded([&store](const httplib::Request& req, httplib::Response& res) {
              send_page(res, req, store.daily_stats(req.get_param_value("keyword")), "stats");
          }));

    if (port == 0) {
        port_ = s.bind_to_any_port("127.0.0.1");
    } else {
        if (!s.bind_to_port("127.0.0.1", port)) throw StoreError("cannot bind api port");
        port_ = port;
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    s.wait_until_ready();
    return port_;
}

void ApiServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
    if (impl_ && impl_->thread.joinable()) impl_->thread.join();
}

void ApiServer::wait() {
    if (impl_ && impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace spamwatch
