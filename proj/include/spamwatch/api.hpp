#pragma once

#include <memory>
#include <string>

#include "spamwatch/store.hpp"

namespace spamwatch {

// JSON REST API over a DetectionStore.
//
//   GET /api/groups?keyword=&date=&limit=&offset=
//   GET /api/groups/{id}
//   GET /api/groups/{id}/accounts
//   GET /api/campaigns
//   GET /api/campaigns/{email}
//   GET /api/blacklist
//   GET /api/stats/daily?keyword=
//   GET /api/health
//
// List endpoints paginate with limit (default 100, max 1000) and offset.
// Unknown ids give 404; malformed query parameters give 400. Responses are
// byte-stable for a given store.
class ApiServer {
public:
    explicit ApiServer(const DetectionStore& store);
    ~ApiServer();

    // Binds 127.0.0.1:port (port 0 picks a free one) and serves on a
    // background thread. Returns the bound port.
    int start(int port);
    void stop();
    void wait();  // blocks until stop()
    int port() const { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    const DetectionStore& store_;
    int port_ = 0;
};

}  // namespace spamwatch
