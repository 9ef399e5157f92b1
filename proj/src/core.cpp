#include "spamwatch/core.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <ctime>

#include <nlohmann/json.hpp>

namespace spamwatch {

using nlohmann::json;

// ---------------------------------------------------------------------------
// time

std::optional<Timestamp> parse_timestamp(const std::string& s) {
    std::tm tm{};
    int y, mo, d, h = 0, mi = 0, se = 0;
    double frac = 0.0;
    char tail[16] = {0};
    int n = std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d%15s", &y, &mo, &d, &h, &mi, &se, tail);
    if (n >= 6) {
        std::string rest(tail);
        if (!rest.empty() && rest[0] == '.') {
            size_t i = 1;
            while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
            frac = 0.0;  // sub-second precision is dropped
            rest = rest.substr(i);
        }
        if (!(rest.empty() || rest == "Z" || rest == "z" || rest == "+00:00" || rest == "+0000"))
            return std::nullopt;
        (void)frac;
    } else if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &mo, &d) == 3 &&
               s.find('T') == std::string::npos) {
        h = mi = se = 0;
    } else {
        return std::nullopt;
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60) return std::nullopt;
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = se;
    return static_cast<Timestamp>(timegm(&tm));
}

std::string format_timestamp(Timestamp t) {
    std::time_t tt = static_cast<std::time_t>(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::string format_date(Timestamp t) {
    std::time_t tt = static_cast<std::time_t>(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday);
    return buf;
}

std::optional<Timestamp> parse_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    return parse_timestamp(s);
}

// ---------------------------------------------------------------------------
// urls

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool valid_scheme(const std::string& s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '+' || c == '-' || c == '.';
    });
}

// host labels: alnum, '-', '_' (seen in the wild); dots separate non-empty
// labels. Optional :port. Bracketed IPv6 is accepted verbatim.
bool valid_host_port(const std::string& hp) {
    if (hp.empty()) return false;
    std::string host = hp;
    if (hp[0] == '[') {
        auto close = hp.find(']');
        if (close == std::string::npos) return false;
        std::string inside = hp.substr(1, close - 1);
        if (inside.empty()) return false;
        for (unsigned char c : inside)
            if (!std::isxdigit(c) && c != ':' && c != '.') return false;
        host = hp.substr(close + 1);
        if (host.empty()) return true;
        if (host[0] != ':') return false;
        host = host.substr(1);
        return !host.empty() &&
               std::all_of(host.begin(), host.end(),
                           [](unsigned char c) { return std::isdigit(c); });
    }
    auto colon = hp.rfind(':');
    if (colon != std::string::npos) {
        std::string port = hp.substr(colon + 1);
        if (port.empty() ||
            !std::all_of(port.begin(), port.end(),
                         [](unsigned char c) { return std::isdigit(c); }))
            return false;
        host = hp.substr(0, colon);
    }
    if (host.empty() || host.front() == '.' || host.back() == '.') return false;
    bool label_has_char = false;
    bool any_alnum = false;
    for (unsigned char c : host) {
        if (c == '.') {
            if (!label_has_char) return false;
            label_has_char = false;
        } else if (std::isalnum(c) || c == '-' || c == '_') {
            label_has_char = true;
            if (std::isalnum(c)) any_alnum = true;
        } else {
            return false;
        }
    }
    return label_has_char && any_alnum;
}

}  // namespace

std::optional<Url> try_extract_netloc(const std::string& raw) {
    std::string s = raw;
    // trim outer ascii whitespace only; inner whitespace invalidates the host
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return std::nullopt;
    auto e = s.find_last_not_of(" \t\r\n");
    s = s.substr(b, e - b + 1);

    Url u;
    u.raw = raw;
    std::string rest = s;
    auto sep = s.find("://");
    if (sep != std::string::npos && valid_scheme(s.substr(0, sep))) {
        u.scheme = lower(s.substr(0, sep));
        u.had_scheme = true;
        rest = s.substr(sep + 3);
    } else {
        u.scheme = "http";
        u.had_scheme = false;
    }

    auto auth_end = rest.find_first_of("/?#");
    std::string authority = rest.substr(0, auth_end);
    std::string tail = auth_end == std::string::npos ? "" : rest.substr(auth_end);

    // drop userinfo
    auto at = authority.rfind('@');
    if (at != std::string::npos) authority = authority.substr(at + 1);

    if (!valid_host_port(authority)) return std::nullopt;
    u.netloc = lower(authority);

    auto q = tail.find('?');
    auto hash = tail.find('#');
    if (hash != std::string::npos && q != std::string::npos && hash < q) q = std::string::npos;
    if (q != std::string::npos) {
        u.path = tail.substr(0, q);
        if (hash != std::string::npos)
            u.query = tail.substr(q + 1, hash - q - 1);
        else
            u.query = tail.substr(q + 1);
    } else if (hash != std::string::npos) {
        u.path = tail.substr(0, hash);
    } else {
        u.path = tail;
    }
    if (hash != std::string::npos) u.fragment = tail.substr(hash + 1);
    return u;
}

Url extract_netloc(const std::string& raw) {
    auto u = try_extract_netloc(raw);
    if (!u) throw MalformedUrl(raw);
    return *u;
}

std::string Url::host() const {
    if (!netloc.empty() && netloc[0] == '[') {
        auto close = netloc.find(']');
        return netloc.substr(0, close == std::string::npos ? netloc.size() : close + 1);
    }
    auto colon = netloc.rfind(':');
    return colon == std::string::npos ? netloc : netloc.substr(0, colon);
}

std::string Url::netloc_only() const { return scheme + "://" + netloc + "/"; }

std::string Url::full() const {
    std::string s = scheme + "://" + netloc + path;
    if (!query.empty()) s += "?" + query;
    if (!fragment.empty()) s += "#" + fragment;
    return s;
}

std::string Url::to_string() const {
    std::string s = had_scheme ? scheme + "://" : "";
    s += netloc + path;
    if (!query.empty()) s += "?" + query;
    if (!fragment.empty()) s += "#" + fragment;
    return s;
}

Url resolve_reference(const Url& base, const std::string& reference) {
    if (auto abs = try_extract_netloc(reference); abs && abs->had_scheme) return *abs;
    if (reference.rfind("//", 0) == 0) return extract_netloc(base.scheme + ":" + reference);
    Url u = base;
    u.query.clear();
    u.fragment.clear();
    if (reference.empty()) return u;
    if (reference[0] == '/') {
        u.path = reference;
    } else {
        auto slash = base.path.rfind('/');
        u.path = (slash == std::string::npos ? std::string("/") : base.path.substr(0, slash + 1)) +
                 reference;
    }
    auto q = u.path.find('?');
    if (q != std::string::npos) {
        u.query = u.path.substr(q + 1);
        u.path = u.path.substr(0, q);
    }
    u.raw = u.full();
    u.had_scheme = true;
    return u;
}

// ---------------------------------------------------------------------------
// canonical text

namespace {

// Unicode White_Space code points.
bool is_unicode_space(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

// Decodes one UTF-8 code point; invalid bytes pass through as themselves so
// canonicalization never throws.
char32_t next_codepoint(const std::string& s, size_t& i, size_t& len) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    len = 1;
    if (c < 0x80) return c;
    int extra = 0;
    char32_t cp = 0;
    if ((c & 0xE0) == 0xC0) { extra = 1; cp = c & 0x1F; }
    else if ((c & 0xF0) == 0xE0) { extra = 2; cp = c & 0x0F; }
    else if ((c & 0xF8) == 0xF0) { extra = 3; cp = c & 0x07; }
    else return c;
    if (i + extra >= s.size()) return c;
    for (int k = 1; k <= extra; ++k) {
        unsigned char cc = static_cast<unsigned char>(s[i + k]);
        if ((cc & 0xC0) != 0x80) return c;
        cp = (cp << 6) | (cc & 0x3F);
    }
    len = static_cast<size_t>(extra) + 1;
    return cp;
}

}  // namespace

std::string canonicalize_text(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    bool emitted = false;
    size_t i = 0;
    while (i < text.size()) {
        size_t len = 1;
        char32_t cp = next_codepoint(text, i, len);
        if (is_unicode_space(cp)) {
            pending_space = emitted;  // leading whitespace drops
        } else {
            if (pending_space) {
                out += ' ';
                pending_space = false;
            }
            out.append(text, i, len);
            emitted = true;
        }
        i += len;
    }
    return out;
}

std::string canonicalize_text_without_urls(const std::string& text) {
    std::string canon = canonicalize_text(text);
    std::string out;
    size_t pos = 0;
    while (pos <= canon.size()) {
        auto sp = canon.find(' ', pos);
        std::string tok = canon.substr(pos, sp == std::string::npos ? std::string::npos : sp - pos);
        bool is_url = tok.rfind("http://", 0) == 0 || tok.rfind("https://", 0) == 0;
        if (!tok.empty() && !is_url) {
            if (!out.empty()) out += ' ';
            out += tok;
        }
        if (sp == std::string::npos) break;
        pos = sp + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// tweet wire format

namespace {

std::string json_id(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
    if (j.is_number_unsigned()) return std::to_string(j.get<std::uint64_t>());
    throw std::runtime_error("id is neither string nor integer");
}

Timestamp json_time(const json& j) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_unsigned()) return static_cast<Timestamp>(j.get<std::uint64_t>());
    if (j.is_string()) {
        auto t = parse_timestamp(j.get<std::string>());
        if (t) return *t;
    }
    throw std::runtime_error("unparseable timestamp");
}

}  // namespace

std::optional<Tweet> parse_tweet_json(const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    try {
        Tweet t;
        t.tweet_id = json_id(j.at("id"));
        t.created_at = json_time(j.at("created_at"));
        t.text = j.at("text").get<std::string>();
        const json& u = j.at("user");
        t.user.account_id = json_id(u.at("id"));
        t.user.screen_name = u.value("screen_name", "");
        t.user.statuses_count = u.value("statuses_count", std::int64_t{0});
        t.user.friends_count = u.value("friends_count", std::int64_t{0});
        t.user.followers_count = u.value("followers_count", std::int64_t{0});
        t.user.lang = u.value("lang", "");
        if (u.contains("created_at")) t.user.created_at = json_time(u.at("created_at"));
        t.author = t.user.account_id;
        if (j.contains("urls"))
            for (const auto& e : j.at("urls")) t.embedded_urls.push_back(e.get<std::string>());
        if (t.user.statuses_count < 0 || t.user.friends_count < 0 || t.user.followers_count < 0)
            return std::nullopt;
        return t;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::string tweet_to_json(const Tweet& t) {
    json j;
    j["id"] = t.tweet_id;
    j["created_at"] = format_timestamp(t.created_at);
    j["text"] = t.text;
    j["user"] = {{"id", t.user.account_id},
                 {"screen_name", t.user.screen_name},
                 {"statuses_count", t.user.statuses_count},
                 {"friends_count", t.user.friends_count},
                 {"followers_count", t.user.followers_count},
                 {"lang", t.user.lang},
                 {"created_at", format_timestamp(t.user.created_at)}};
    j["urls"] = t.embedded_urls;
    return j.dump();
}

// ---------------------------------------------------------------------------
// hashing

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace spamwatch
