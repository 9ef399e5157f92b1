#include "spamwatch/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

namespace spamwatch {

bool contains_keyword(const std::string& text, const std::string& keyword) {
    if (keyword.empty()) return true;
    if (keyword.size() > text.size()) return false;
    auto tolow = [](unsigned char c) { return static_cast<char>(std::tolower(c)); };
    auto it = std::search(text.begin(), text.end(), keyword.begin(), keyword.end(),
                          [&](char a, char b) { return tolow(a) == tolow(b); });
    return it != text.end();
}

namespace {

class LineStream : public TweetStream {
public:
    LineStream(std::string keyword) : keyword_(std::move(keyword)) {}

    std::optional<Tweet> next() override {
        std::string line;
        while (read_line(line)) {
            if (line.empty()) continue;
            auto t = parse_tweet_json(line);
            if (!t) {
                ++parse_errors_;
                continue;
            }
            if (contains_keyword(t->text, keyword_)) return t;
        }
        return std::nullopt;
    }

    std::size_t parse_errors() const override { return parse_errors_; }

protected:
    virtual bool read_line(std::string& out) = 0;

private:
    std::string keyword_;
    std::size_t parse_errors_ = 0;
};

class FileStream : public LineStream {
public:
    FileStream(const std::string& path, std::string keyword)
        : LineStream(std::move(keyword)), in_(path) {
        if (!in_) throw SourceUnavailable("cannot open " + path);
    }

private:
    bool read_line(std::string& out) override { return static_cast<bool>(std::getline(in_, out)); }
    std::ifstream in_;
};

class SocketStream : public LineStream {
public:
    SocketStream(const std::string& host, const std::string& port, std::string keyword)
        : LineStream(std::move(keyword)) {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* res = nullptr;
        if (getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0 || !res)
            throw SourceUnavailable("cannot resolve " + host + ":" + port);
        for (addrinfo* p = res; p; p = p->ai_next) {
            fd_ = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
            if (fd_ < 0) continue;
            if (::connect(fd_, p->ai_addr, p->ai_addrlen) == 0) break;
            ::close(fd_);
            fd_ = -1;
        }
        freeaddrinfo(res);
        if (fd_ < 0) throw SourceUnavailable("cannot connect to " + host + ":" + port);
    }

    ~SocketStream() override {
        if (fd_ >= 0) ::close(fd_);
    }

private:
    bool read_line(std::string& out) override {
        out.clear();
        while (true) {
            auto nl = buf_.find('\n');
            if (nl != std::string::npos) {
                out = buf_.substr(0, nl);
                if (!out.empty() && out.back() == '\r') out.pop_back();
                buf_.erase(0, nl + 1);
                return true;
            }
            char chunk[4096];
            ssize_t n = ::read(fd_, chunk, sizeof(chunk));
            if (n <= 0) {
                if (buf_.empty()) return false;
                out.swap(buf_);
                return true;
            }
            buf_.append(chunk, static_cast<size_t>(n));
        }
    }

    int fd_ = -1;
    std::string buf_;
};

class VectorStream : public TweetStream {
public:
    VectorStream(std::vector<Tweet> tweets, std::string keyword)
        : tweets_(std::move(tweets)), keyword_(std::move(keyword)) {}

    std::optional<Tweet> next() override {
        while (pos_ < tweets_.size()) {
            const Tweet& t = tweets_[pos_++];
            if (contains_keyword(t.text, keyword_)) return t;
        }
        return std::nullopt;
    }

    std::size_t parse_errors() const override { return 0; }

private:
    std::vector<Tweet> tweets_;
    std::string keyword_;
    std::size_t pos_ = 0;
};

}  // namespace

std::unique_ptr<TweetStream> open_stream(const std::string& uri, const std::string& keyword) {
    if (uri.rfind("tcp://", 0) == 0) {
        std::string hp = uri.substr(6);
        auto colon = hp.rfind(':');
        if (colon == std::string::npos) throw SourceUnavailable("tcp uri needs host:port: " + uri);
        return std::make_unique<SocketStream>(hp.substr(0, colon), hp.substr(colon + 1), keyword);
    }
    std::string path = uri.rfind("file:", 0) == 0 ? uri.substr(5) : uri;
    return std::make_unique<FileStream>(path, keyword);
}

std::unique_ptr<TweetStream> open_vector_stream(std::vector<Tweet> tweets,
                                                const std::string& keyword) {
    return std::make_unique<VectorStream>(std::move(tweets), keyword);
}

std::vector<Tweet> collect_n(TweetStream& stream, std::size_t n) {
    std::vector<Tweet> out;
    out.reserve(std::min<std::size_t>(n, 4096));
    while (out.size() < n) {
        auto t = stream.next();
        if (!t) break;
        out.push_back(std::move(*t));
    }
    return out;
}

}  // namespace spamwatch
