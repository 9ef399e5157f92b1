#include "spamwatch/trend.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace spamwatch {

TrendWindow::TrendWindow(int top_k, int window_minutes, std::set<std::string> whitelist,
                         Timestamp started_at)
    : top_k_(top_k),
      window_minutes_(window_minutes),
      whitelist_(std::move(whitelist)),
      window_started_at_(started_at) {
    if (top_k_ < 1) top_k_ = 1;
    if (window_minutes_ < 1) window_minutes_ = 1;
}

void TrendWindow::reset(Timestamp now) {
    counts_.clear();
    triggered_.clear();
    // advance in whole windows so boundaries stay on the original grid
    std::int64_t win = std::int64_t{window_minutes_} * 60;
    std::int64_t behind = now - window_started_at_;
    window_started_at_ += (behind / win) * win;
}

bool TrendWindow::is_whitelisted(const std::string& netloc) const {
    return whitelist_.count(netloc) > 0;
}

bool TrendWindow::in_top_k(const std::string& netloc) const {
    auto it = counts_.find(netloc);
    if (it == counts_.end()) return false;
    const std::int64_t c = it->second;
    // rank = number of entries strictly ahead under (count desc, netloc asc)
    std::size_t ahead = 0;
    for (const auto& [n, cnt] : counts_) {
        if (cnt > c || (cnt == c && n < netloc)) ++ahead;
        if (ahead >= static_cast<std::size_t>(top_k_)) return false;
    }
    return true;
}

std::vector<Trigger> TrendWindow::observe(const Tweet& tweet, Timestamp now) {
    if (now >= window_started_at_ + std::int64_t{window_minutes_} * 60) reset(now);

    std::vector<Trigger> fired;
    for (const auto& raw : tweet.embedded_urls) {
        auto url = try_extract_netloc(raw);
        if (!url) continue;
        std::int64_t c = ++counts_[url->netloc];
        if (is_whitelisted(url->netloc)) continue;
        if (triggered_.count(url->netloc)) continue;
        if (!in_top_k(url->netloc)) continue;
        triggered_.insert(url->netloc);
        fired.push_back(Trigger{url->netloc, c, now});
    }
    return fired;
}

std::vector<std::pair<std::string, std::int64_t>> TrendWindow::top_k_snapshot() const {
    std::vector<std::pair<std::string, std::int64_t>> all(counts_.begin(), counts_.end());
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (all.size() > static_cast<std::size_t>(top_k_)) all.resize(static_cast<std::size_t>(top_k_));
    return all;
}

std::set<std::string> parse_whitelist(const std::string& content) {
    std::set<std::string> out;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r");
        std::string netloc = line.substr(b, e - b + 1);
        std::transform(netloc.begin(), netloc.end(), netloc.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        out.insert(netloc);
    }
    return out;
}

std::set<std::string> load_whitelist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open whitelist: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_whitelist(ss.str());
}

}  // namespace spamwatch
