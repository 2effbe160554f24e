#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "copra/csv.hpp"
#include "copra/error.hpp"
#include "copra/rng.hpp"

namespace copra {

// One planted community. rho is the probability a member's retweet comes from
// the community pool instead of the global pool; pi is the fraction of the
// member's chunks written in the propaganda vocabulary. rho_spread and
// pi_gradient tilt both across member rank so coordination and propaganda can
// be made to co-vary (or anti-vary) within the community.
struct CommunityPlan {
    std::size_t size = 0;
    double rho = 0.9;
    double pi = 0.5;
    double automation = 0.0;
    double suspension = 0.0;
    double rho_spread = 0.0;
    std::string pi_gradient = "none";  // none | rising | falling
    std::size_t pool_size = 40;
};

struct ScenarioConfig {
    std::vector<CommunityPlan> communities;
    std::size_t global_pool = 200;
    std::size_t retweets_min = 20;
    std::size_t retweets_max = 40;
    std::size_t chunks_per_user = 3;
    std::size_t tweets_per_chunk = 20;  // 20-token tweets, so 400 tokens per chunk
    std::size_t training_items = 1000;
    std::size_t article_count = 12;
    std::size_t user_budget = 0;  // 0 = unlimited
    std::uint64_t seed = 0;
};

struct PlantedUser {
    int community = -1;
    double rho = 0.0;
    double pi = 0.0;
    double automation = 0.0;
    bool suspended = false;
};

struct GroundTruth {
    std::map<std::string, PlantedUser> users;  // members only, not pool authors
};

namespace detail {

// Disjoint template vocabularies keep the classification problem separable by
// construction.
inline const std::array<const char*, 64>& propaganda_words() {
    static const std::array<const char*, 64> words = {
        "agenda",     "betrayal",  "collapse",   "conspiracy", "corrupt",    "coverup",
        "crisis",     "deceit",    "decline",    "destroy",    "downfall",   "elite",
        "enemy",      "exposed",   "fraud",      "fury",       "hoax",       "illegal",
        "invasion",   "lies",      "manipulate", "menace",     "outrage",    "plot",
        "propaganda", "puppet",    "radical",    "regime",     "rigged",     "ruin",
        "scandal",    "scheme",    "secret",     "shadow",     "shameful",   "smear",
        "takeover",   "threat",    "traitor",    "treason",    "tyranny",    "unrest",
        "uprising",   "villain",   "warning",    "weaponize",  "agitator",   "alarmist",
        "blacklist",  "chaos",     "collude",    "crackdown",  "demagogue",  "disgrace",
        "divide",     "doom",      "fearmonger", "infiltrate", "insidious",  "mob",
        "panic",      "peril",     "sabotage",   "subvert",
    };
    return words;
}

inline const std::array<const char*, 64>& neutral_words() {
    static const std::array<const char*, 64> words = {
        "autumn",    "bakery",    "bicycle",   "birdsong", "blanket",  "breeze",
        "brunch",    "cabin",     "candle",    "cheerful", "chocolate", "coastline",
        "cottage",   "crafts",    "daisy",     "daylight", "festival", "fireside",
        "flowers",   "friendly",  "garden",    "gentle",   "hammock",  "harvest",
        "hiking",    "holiday",   "honey",     "kitchen",  "lantern",  "laughter",
        "lakeside",  "lemonade",  "library",   "meadow",   "melody",   "morning",
        "museum",    "orchard",   "outdoors",  "pancake",  "picnic",   "playful",
        "pottery",   "puzzle",    "quilt",     "rainbow",  "recipe",   "relaxing",
        "riverbank", "seaside",   "snowfall",  "songbird", "sunrise",  "sunshine",
        "sweater",   "teapot",    "trail",     "tulip",    "vacation", "village",
        "waffle",    "weekend",   "willow",    "wonder",
    };
    return words;
}

inline std::string make_text(Rng& rng, bool propagandistic, std::size_t tokens) {
    const auto& vocab = propagandistic ? propaganda_words() : neutral_words();
    std::string text;
    for (std::size_t i = 0; i < tokens; ++i) {
        if (i) text += ' ';
        text += vocab[rng.below(vocab.size())];
    }
    return text;
}

inline std::string pad(std::size_t value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

inline double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace detail

inline void validate(const ScenarioConfig& config) {
    if (config.communities.empty()) throw Error("scenario needs at least one community");
    std::size_t total = 0;
    for (const auto& plan : config.communities) {
        if (plan.size < 2) throw Error("community sizes must be >= 2");
        for (double rate : {plan.rho, plan.pi, plan.automation, plan.suspension})
            if (!(rate >= 0.0 && rate <= 1.0)) throw Error("rates must be in [0,1]");
        if (plan.rho_spread < 0.0 || plan.rho_spread > 1.0)
            throw Error("rho_spread must be in [0,1]");
        if (plan.pi_gradient != "none" && plan.pi_gradient != "rising" &&
            plan.pi_gradient != "falling")
            throw Error("pi_gradient must be none, rising or falling");
        if (plan.pool_size == 0) throw Error("community pool_size must be positive");
        total += plan.size;
    }
    if (config.user_budget > 0 && total > config.user_budget)
        throw Error("community sizes exceed user budget");
    if (config.global_pool == 0) throw Error("global_pool must be positive");
    if (config.retweets_min == 0 || config.retweets_min > config.retweets_max)
        throw Error("retweet range must satisfy 1 <= min <= max");
    if (config.chunks_per_user == 0) throw Error("chunks_per_user must be positive");
    if (config.tweets_per_chunk == 0) throw Error("tweets_per_chunk must be positive");
    if (config.training_items < 2) throw Error("training_items must be >= 2");
}

// Deterministic scenario generation. Writes tweets.jsonl, articles.jsonl,
// signals.csv, training.jsonl and ground_truth.json into out_dir; the same
// seed always produces byte-identical files.
inline GroundTruth generate(const ScenarioConfig& config, const std::string& out_dir) {
    validate(config);
    std::filesystem::create_directories(out_dir);
    Rng rng(config.seed);

    const std::int64_t base_ts = 1600000000;
    std::size_t tweet_counter = 0;
    auto next_tweet = [&](const std::string& author, const std::string& text) {
        nlohmann::ordered_json doc;
        doc["id"] = "t" + detail::pad(tweet_counter, 8);
        doc["author_id"] = author;
        doc["ts"] = base_ts + static_cast<std::int64_t>(tweet_counter) * 60;
        doc["text"] = text;
        ++tweet_counter;
        return doc;
    };

    std::ofstream tweets(out_dir + "/tweets.jsonl");
    if (!tweets) throw Error("cannot write " + out_dir + "/tweets.jsonl");

    // articles first so tweet links can reference them
    std::vector<std::string> prop_articles, clean_articles;
    std::vector<std::string> frames = {"economy", "public_opinion", "morality"};
    {
        std::ofstream articles(out_dir + "/articles.jsonl");
        if (!articles) throw Error("cannot write " + out_dir + "/articles.jsonl");
        for (std::size_t i = 0; i < config.article_count; ++i) {
            const bool prop = i % 2 == 0;
            const std::string url = "https://example.org/story" + detail::pad(i, 3);
            nlohmann::ordered_json doc;
            doc["url"] = url;
            doc["title"] = detail::make_text(rng, prop, 5);
            doc["text"] = detail::make_text(rng, prop, 400);
            doc["frame"] = frames[i % frames.size()];
            articles << doc.dump() << '\n';
            (prop ? prop_articles : clean_articles).push_back(url);
        }
    }

    // retweet pools: one seed author per community plus one global seed
    std::vector<std::vector<std::string>> pool_ids(config.communities.size());
    for (std::size_t c = 0; c < config.communities.size(); ++c) {
        const std::string author = "seed" + detail::pad(c, 2);
        for (std::size_t i = 0; i < config.communities[c].pool_size; ++i) {
            auto doc = next_tweet(author, detail::make_text(rng, false, 20));
            pool_ids[c].push_back(doc["id"].get<std::string>());
            tweets << doc.dump() << '\n';
        }
    }
    std::vector<std::string> global_ids;
    for (std::size_t i = 0; i < config.global_pool; ++i) {
        auto doc = next_tweet("gseed", detail::make_text(rng, false, 20));
        global_ids.push_back(doc["id"].get<std::string>());
        tweets << doc.dump() << '\n';
    }

    GroundTruth truth;
    for (std::size_t c = 0; c < config.communities.size(); ++c) {
        const CommunityPlan& plan = config.communities[c];
        for (std::size_t rank = 0; rank < plan.size; ++rank) {
            const std::string user = "c" + detail::pad(c, 2) + "_u" + detail::pad(rank, 3);
            const double frac =
                plan.size == 1 ? 0.5 : static_cast<double>(rank) / static_cast<double>(plan.size - 1);

            PlantedUser planted;
            planted.community = static_cast<int>(c);
            planted.rho = detail::clamp01(plan.rho + plan.rho_spread * (frac - 0.5));
            planted.pi = plan.pi;
            if (plan.pi_gradient == "rising")
                planted.pi = detail::clamp01(plan.pi + 0.4 * (2.0 * frac - 1.0));
            else if (plan.pi_gradient == "falling")
                planted.pi = detail::clamp01(plan.pi - 0.4 * (2.0 * frac - 1.0));
            planted.automation = detail::clamp01(plan.automation * (0.5 + frac));
            planted.suspended =
                plan.suspension > 0.0 &&
                frac >= 1.0 - plan.suspension;  // the most coordinated ranks are suspended

            // original tweets in chunk-sized blocks of uniform class
            for (std::size_t chunk = 0; chunk < config.chunks_per_user; ++chunk) {
                const bool prop = rng.coin(planted.pi);
                for (std::size_t i = 0; i < config.tweets_per_chunk; ++i) {
                    auto doc = next_tweet(user, detail::make_text(rng, prop, 20));
                    if (i == 0 && rng.coin(0.5)) {
                        const auto& pool = prop ? prop_articles : clean_articles;
                        if (!pool.empty())
                            doc["urls"] = nlohmann::ordered_json::array({pool[rng.below(pool.size())]});
                    }
                    tweets << doc.dump() << '\n';
                }
            }

            // retweets drawn from the community pool with probability rho
            const std::size_t n_retweets =
                config.retweets_min +
                rng.below(config.retweets_max - config.retweets_min + 1);
            for (std::size_t i = 0; i < n_retweets; ++i) {
                const bool from_community = rng.coin(planted.rho);
                const auto& pool = from_community ? pool_ids[c] : global_ids;
                const std::string& target = pool[rng.below(pool.size())];
                auto doc = next_tweet(user, "rt");
                doc["retweeted_id"] = target;
                tweets << doc.dump() << '\n';
            }

            truth.users[user] = planted;
        }
    }

    {
        std::ofstream signals(out_dir + "/signals.csv");
        if (!signals) throw Error("cannot write " + out_dir + "/signals.csv");
        signals << "user_id,automation_score,suspended\n";
        for (const auto& [user, planted] : truth.users)
            signals << csv::escape(user) << ',' << csv::fixed(planted.automation, 6) << ','
                    << (planted.suspended ? '1' : '0') << '\n';
    }

    {
        std::ofstream training(out_dir + "/training.jsonl");
        if (!training) throw Error("cannot write " + out_dir + "/training.jsonl");
        for (std::size_t i = 0; i < config.training_items; ++i) {
            const bool prop = i % 2 == 0;
            nlohmann::ordered_json doc;
            doc["text"] = detail::make_text(rng, prop, 400);
            doc["label"] = prop ? 1 : 0;
            training << doc.dump() << '\n';
        }
    }

    {
        nlohmann::ordered_json doc;
        doc["format"] = "copra-ground-truth";
        doc["version"] = 1;
        doc["seed"] = config.seed;
        nlohmann::ordered_json communities = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < config.communities.size(); ++c) {
            const CommunityPlan& plan = config.communities[c];
            communities.push_back({{"index", c},
                                   {"size", plan.size},
                                   {"rho", plan.rho},
                                   {"pi", plan.pi},
                                   {"automation", plan.automation},
                                   {"suspension", plan.suspension},
                                   {"rho_spread", plan.rho_spread},
                                   {"pi_gradient", plan.pi_gradient},
                                   {"pool_size", plan.pool_size}});
        }
        doc["communities"] = communities;
        nlohmann::ordered_json users = nlohmann::ordered_json::object();
        for (const auto& [user, planted] : truth.users)
            users[user] = {{"community", planted.community},
                           {"rho", planted.rho},
                           {"pi", planted.pi},
                           {"automation", planted.automation},
                           {"suspended", planted.suspended}};
        doc["users"] = users;
        std::ofstream out(out_dir + "/ground_truth.json");
        if (!out) throw Error("cannot write " + out_dir + "/ground_truth.json");
        out << doc.dump(1) << '\n';
    }

    return truth;
}

inline GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open ground truth file " + path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error("ground truth file is not valid JSON: " + path);
    if (doc.value("format", "") != "copra-ground-truth")
        throw Error("not a ground truth file: " + path);
    GroundTruth truth;
    for (const auto& [user, planted] : doc.at("users").items()) {
        PlantedUser p;
        p.community = planted.at("community").get<int>();
        p.rho = planted.at("rho").get<double>();
        p.pi = planted.at("pi").get<double>();
        p.automation = planted.at("automation").get<double>();
        p.suspended = planted.at("suspended").get<bool>();
        truth.users[user] = p;
    }
    return truth;
}

// "size:rho:pi[:automation[:suspension]]" groups separated by commas, e.g.
// "80:0.9:0.9,60:0.9:0.5,50:0.9:0.1".
inline std::vector<CommunityPlan> parse_communities_arg(const std::string& arg) {
    std::vector<CommunityPlan> plans;
    std::size_t pos = 0;
    while (pos <= arg.size()) {
        std::size_t comma = arg.find(',', pos);
        const std::string group =
            arg.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!group.empty()) {
            std::vector<std::string> parts;
            std::size_t p = 0;
            while (p <= group.size()) {
                std::size_t colon = group.find(':', p);
                parts.push_back(
                    group.substr(p, colon == std::string::npos ? std::string::npos : colon - p));
                if (colon == std::string::npos) break;
                p = colon + 1;
            }
            if (parts.size() < 3) throw Error("community group needs size:rho:pi — got " + group);
            try {
                CommunityPlan plan;
                plan.size = static_cast<std::size_t>(std::stoul(parts[0]));
                plan.rho = std::stod(parts[1]);
                plan.pi = std::stod(parts[2]);
                if (parts.size() > 3) plan.automation = std::stod(parts[3]);
                if (parts.size() > 4) plan.suspension = std::stod(parts[4]);
                plans.push_back(plan);
            } catch (const std::exception&) {
                throw Error("cannot parse community group: " + group);
            }
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (plans.empty()) throw Error("no community groups given");
    return plans;
}

// Full-control scenario file. Unknown keys are rejected to catch typos.
inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file " + path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error("scenario file is not valid JSON: " + path);

    ScenarioConfig config;
    for (const auto& [key, value] : doc.items()) {
        if (key == "seed") config.seed = value.get<std::uint64_t>();
        else if (key == "global_pool") config.global_pool = value.get<std::size_t>();
        else if (key == "retweets_min") config.retweets_min = value.get<std::size_t>();
        else if (key == "retweets_max") config.retweets_max = value.get<std::size_t>();
        else if (key == "chunks_per_user") config.chunks_per_user = value.get<std::size_t>();
        else if (key == "tweets_per_chunk") config.tweets_per_chunk = value.get<std::size_t>();
        else if (key == "training_items") config.training_items = value.get<std::size_t>();
        else if (key == "articles") config.article_count = value.get<std::size_t>();
        else if (key == "user_budget") config.user_budget = value.get<std::size_t>();
        else if (key == "communities") {
            for (const auto& c : value) {
                CommunityPlan plan;
                for (const auto& [ckey, cvalue] : c.items()) {
                    if (ckey == "size") plan.size = cvalue.get<std::size_t>();
                    else if (ckey == "rho") plan.rho = cvalue.get<double>();
                    else if (ckey == "pi") plan.pi = cvalue.get<double>();
                    else if (ckey == "automation") plan.automation = cvalue.get<double>();
                    else if (ckey == "suspension") plan.suspension = cvalue.get<double>();
                    else if (ckey == "rho_spread") plan.rho_spread = cvalue.get<double>();
                    else if (ckey == "pi_gradient") plan.pi_gradient = cvalue.get<std::string>();
                    else if (ckey == "pool_size") plan.pool_size = cvalue.get<std::size_t>();
                    else throw Error("unknown community key in scenario: " + ckey);
                }
                config.communities.push_back(plan);
            }
        } else {
            throw Error("unknown scenario key: " + key);
        }
    }
    return config;
}

}  // namespace copra
