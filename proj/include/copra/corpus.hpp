#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "copra/assignment.hpp"
#include "copra/csv.hpp"
#include "copra/error.hpp"

namespace copra {

struct Tweet {
    std::string id;
    std::string author_id;
    std::int64_t ts = 0;  // UTC epoch seconds
    std::string text;
    std::optional<std::string> retweeted_id;
    std::optional<std::string> quoted_id;  // quoted tweets are originals
    std::vector<std::string> urls;         // canonicalized at load

    bool is_retweet() const { return retweeted_id.has_value(); }
};

struct Article {
    std::string url;  // canonical
    std::string title;
    std::string text;
    std::optional<std::string> frame;
};

struct UserSignal {
    std::string user_id;
    double automation_score = 0.0;  // in [0, 1]
    bool suspended = false;
};

// Lowercase scheme and host, strip the fragment and common tracking query
// parameters. Path, remaining query order and trailing slashes are kept as-is.
inline std::string canonicalize_url(std::string_view raw) {
    std::string url(raw);
    while (!url.empty() && std::isspace(static_cast<unsigned char>(url.back()))) url.pop_back();
    std::size_t start = 0;
    while (start < url.size() && std::isspace(static_cast<unsigned char>(url[start]))) ++start;
    url = url.substr(start);
    if (url.empty()) return url;

    if (auto hash = url.find('#'); hash != std::string::npos) url.resize(hash);

    std::size_t scheme_end = url.find("://");
    std::size_t host_end;
    if (scheme_end != std::string::npos) {
        host_end = url.find_first_of("/?", scheme_end + 3);
    } else {
        host_end = url.find_first_of("/?");
    }
    if (host_end == std::string::npos) host_end = url.size();
    for (std::size_t i = 0; i < host_end; ++i)
        url[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(url[i])));

    std::size_t q = url.find('?');
    if (q != std::string::npos) {
        static const std::set<std::string> tracking = {
            "fbclid", "gclid", "dclid", "igshid", "mc_cid", "mc_eid", "ref_src", "ref_url",
        };
        std::string query = url.substr(q + 1);
        url.resize(q);
        std::string kept;
        std::size_t pos = 0;
        while (pos <= query.size()) {
            std::size_t amp = query.find('&', pos);
            std::string param = query.substr(pos, amp == std::string::npos ? std::string::npos : amp - pos);
            std::string key = param.substr(0, param.find('='));
            std::string key_lower;
            for (char c : key) key_lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            const bool drop = !param.empty() &&
                              (tracking.count(key_lower) > 0 || key_lower.rfind("utm_", 0) == 0);
            if (!param.empty() && !drop) {
                if (!kept.empty()) kept.push_back('&');
                kept += param;
            }
            if (amp == std::string::npos) break;
            pos = amp + 1;
        }
        if (!kept.empty()) url += "?" + kept;
    }
    return url;
}

struct Corpus {
    std::vector<Tweet> tweets;  // deduplicated, sorted by (ts, id)
    std::unordered_map<std::string, std::size_t> tweet_index;
    std::map<std::string, Article> articles;  // keyed by canonical url
    std::map<std::string, UserSignal> signals;
    std::vector<std::string> users;  // sorted distinct author ids

    // tweet position -> canonical urls that resolve to an article
    std::vector<std::vector<std::string>> article_links;

    std::size_t duplicate_tweets_dropped = 0;
    std::size_t dangling_retweets = 0;

    bool has_user(const std::string& id) const {
        return std::binary_search(users.begin(), users.end(), id);
    }

    const Tweet* find_tweet(const std::string& id) const {
        auto it = tweet_index.find(id);
        return it == tweet_index.end() ? nullptr : &tweets[it->second];
    }
};

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& obj, const char* key,
                                           std::size_t lineno) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(std::string("missing field '") + key + "'", lineno);
    return *it;
}

inline std::string require_string(const nlohmann::json& obj, const char* key, std::size_t lineno) {
    const auto& v = require_field(obj, key, lineno);
    if (!v.is_string())
        throw ParseError(std::string("field '") + key + "' must be a string", lineno);
    return v.get<std::string>();
}

}  // namespace detail

// JSON Lines, one tweet per line: id, author_id, ts, text, optional
// retweeted_id / quoted_id / urls. Duplicate ids: last record wins.
inline void load_tweets(Corpus& corpus, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open tweet file " + path);

    std::unordered_map<std::string, Tweet> by_id;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object())
            throw ParseError("invalid JSON object", lineno);

        Tweet t;
        t.id = detail::require_string(obj, "id", lineno);
        t.author_id = detail::require_string(obj, "author_id", lineno);
        const auto& ts = detail::require_field(obj, "ts", lineno);
        if (!ts.is_number_integer() || ts.get<std::int64_t>() < 0)
            throw ParseError("field 'ts' must be a non-negative integer", lineno);
        t.ts = ts.get<std::int64_t>();
        t.text = detail::require_string(obj, "text", lineno);
        if (auto it = obj.find("retweeted_id"); it != obj.end() && !it->is_null()) {
            if (!it->is_string()) throw ParseError("field 'retweeted_id' must be a string", lineno);
            t.retweeted_id = it->get<std::string>();
            if (*t.retweeted_id == t.id)
                throw ParseError("tweet retweets itself", lineno);
        }
        if (auto it = obj.find("quoted_id"); it != obj.end() && !it->is_null()) {
            if (!it->is_string()) throw ParseError("field 'quoted_id' must be a string", lineno);
            t.quoted_id = it->get<std::string>();
        }
        if (auto it = obj.find("urls"); it != obj.end() && !it->is_null()) {
            if (!it->is_array()) throw ParseError("field 'urls' must be an array", lineno);
            for (const auto& u : *it) {
                if (!u.is_string()) throw ParseError("urls entries must be strings", lineno);
                std::string canon = canonicalize_url(u.get<std::string>());
                if (!canon.empty()) t.urls.push_back(std::move(canon));
            }
        }

        auto [it, inserted] = by_id.try_emplace(t.id, t);
        if (!inserted) {
            it->second = t;  // last record wins
            ++corpus.duplicate_tweets_dropped;
        }
    }

    corpus.tweets.reserve(by_id.size());
    for (auto& [id, t] : by_id) corpus.tweets.push_back(std::move(t));
    std::sort(corpus.tweets.begin(), corpus.tweets.end(), [](const Tweet& a, const Tweet& b) {
        return a.ts != b.ts ? a.ts < b.ts : a.id < b.id;
    });
}

inline void load_articles(Corpus& corpus, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open article file " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object())
            throw ParseError("invalid JSON object", lineno);
        Article a;
        a.url = canonicalize_url(detail::require_string(obj, "url", lineno));
        a.title = detail::require_string(obj, "title", lineno);
        a.text = detail::require_string(obj, "text", lineno);
        if (a.url.empty()) throw ParseError("article url is empty", lineno);
        if (a.text.empty()) throw ParseError("article text is empty", lineno);
        if (auto it = obj.find("frame"); it != obj.end() && !it->is_null()) {
            if (!it->is_string()) throw ParseError("field 'frame' must be a string", lineno);
            a.frame = it->get<std::string>();
        }
        auto [pos, inserted] = corpus.articles.try_emplace(a.url, a);
        if (!inserted && pos->second.text != a.text)
            throw Error("integrity error: duplicate article url with differing text: " + a.url);
    }
}

// CSV with header user_id,automation_score,suspended.
inline void load_signals(Corpus& corpus, const std::string& path) {
    csv::Reader reader(path);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() != 3 || fields[0] != "user_id" ||
        fields[1] != "automation_score" || fields[2] != "suspended")
        throw ParseError("signal file must start with header user_id,automation_score,suspended", 1);
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 3)
            throw ParseError("expected 3 fields", reader.line());
        UserSignal s;
        s.user_id = fields[0];
        try {
            std::size_t used = 0;
            s.automation_score = std::stod(fields[1], &used);
            if (used != fields[1].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError("automation_score must be a number", reader.line());
        }
        if (!(s.automation_score >= 0.0 && s.automation_score <= 1.0))
            throw ParseError("automation_score must be in [0,1]", reader.line());
        if (fields[2] == "0") s.suspended = false;
        else if (fields[2] == "1") s.suspended = true;
        else throw ParseError("suspended must be 0 or 1", reader.line());
        corpus.signals[s.user_id] = s;
    }
}

inline void finalize_corpus(Corpus& corpus) {
    corpus.tweet_index.clear();
    corpus.tweet_index.reserve(corpus.tweets.size());
    std::set<std::string> user_set;
    for (std::size_t i = 0; i < corpus.tweets.size(); ++i) {
        corpus.tweet_index[corpus.tweets[i].id] = i;
        user_set.insert(corpus.tweets[i].author_id);
    }
    corpus.users.assign(user_set.begin(), user_set.end());

    corpus.dangling_retweets = 0;
    corpus.article_links.assign(corpus.tweets.size(), {});
    for (std::size_t i = 0; i < corpus.tweets.size(); ++i) {
        const Tweet& t = corpus.tweets[i];
        if (t.retweeted_id && corpus.tweet_index.find(*t.retweeted_id) == corpus.tweet_index.end())
            ++corpus.dangling_retweets;  // retained; target text is outside the window
        for (const auto& url : t.urls)
            if (corpus.articles.count(url)) corpus.article_links[i].push_back(url);
    }
}

inline Corpus load_corpus(const std::string& tweet_path,
                          const std::optional<std::string>& article_path = std::nullopt,
                          const std::optional<std::string>& signal_path = std::nullopt) {
    Corpus corpus;
    load_tweets(corpus, tweet_path);
    if (article_path) load_articles(corpus, *article_path);
    if (signal_path) load_signals(corpus, *signal_path);
    finalize_corpus(corpus);
    return corpus;
}

struct CommunityStatsRow {
    std::string community;
    std::size_t users = 0;
    std::size_t article_shares = 0;
    std::size_t distinct_articles = 0;
    std::optional<double> article_pct_distinct;  // raw percentage, blank when shares = 0
    std::size_t tweet_count = 0;
    std::size_t distinct_original_tweets = 0;
    std::optional<double> tweet_pct_distinct;
};

namespace detail {

// Shared-content accounting for one user set. "Distinct original tweets"
// counts distinct original content: ids of originals authored by the set plus
// targets of their retweets (dangling targets included).
inline CommunityStatsRow stats_for_users(const Corpus& corpus,
                                         const std::unordered_set<std::string>& members) {
    CommunityStatsRow row;
    row.users = members.size();
    std::unordered_set<std::string> distinct_articles;
    std::unordered_set<std::string> distinct_content;
    for (std::size_t i = 0; i < corpus.tweets.size(); ++i) {
        const Tweet& t = corpus.tweets[i];
        if (!members.count(t.author_id)) continue;
        ++row.tweet_count;
        if (t.retweeted_id) distinct_content.insert(*t.retweeted_id);
        else distinct_content.insert(t.id);
        for (const auto& url : corpus.article_links[i]) {
            ++row.article_shares;
            distinct_articles.insert(url);
        }
    }
    row.distinct_articles = distinct_articles.size();
    row.distinct_original_tweets = distinct_content.size();
    if (row.article_shares > 0)
        row.article_pct_distinct =
            100.0 * static_cast<double>(row.distinct_articles) / static_cast<double>(row.article_shares);
    if (row.tweet_count > 0)
        row.tweet_pct_distinct = 100.0 * static_cast<double>(row.distinct_original_tweets) /
                                 static_cast<double>(row.tweet_count);
    return row;
}

}  // namespace detail

// Per-community sharing statistics, one row per community ordered by label.
inline std::vector<CommunityStatsRow> community_stats(const Corpus& corpus,
                                                      const CommunityAssignment& assignment) {
    std::vector<std::string> offenders;
    for (const auto& [user, label] : assignment.labels)
        if (!corpus.has_user(user)) offenders.push_back(user);
    if (!offenders.empty()) {
        std::string msg = "assignment references unknown users:";
        for (const auto& u : offenders) msg += " " + u;
        throw Error(msg);
    }

    std::vector<std::unordered_set<std::string>> members(
        static_cast<std::size_t>(assignment.community_count));
    for (const auto& [user, label] : assignment.labels)
        members[static_cast<std::size_t>(label)].insert(user);

    std::vector<CommunityStatsRow> rows;
    for (int label = 0; label < assignment.community_count; ++label) {
        CommunityStatsRow row = detail::stats_for_users(corpus, members[static_cast<std::size_t>(label)]);
        row.community = assignment.display_name(label);
        rows.push_back(std::move(row));
    }
    return rows;
}

// Aggregate row over every assigned user ("overall" in the report output).
inline CommunityStatsRow overall_stats(const Corpus& corpus, const CommunityAssignment& assignment) {
    std::unordered_set<std::string> members;
    for (const auto& [user, label] : assignment.labels) members.insert(user);
    CommunityStatsRow row = detail::stats_for_users(corpus, members);
    row.community = "overall";
    return row;
}

}  // namespace copra
