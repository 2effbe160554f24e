#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "copra/assignment.hpp"
#include "copra/communities.hpp"
#include "copra/corpus.hpp"
#include "copra/csv.hpp"
#include "copra/error.hpp"
#include "copra/graph.hpp"
#include "copra/measures.hpp"
#include "copra/propaganda.hpp"
#include "copra/simnet.hpp"
#include "copra/stats.hpp"
#include "copra/svg.hpp"
#include "copra/synth.hpp"
#include "copra/trend.hpp"

namespace copra {

struct PipelineConfig {
    // [paths]
    std::string tweets;
    std::string articles;
    std::string signals;
    std::string lexicons;  // comma-separated list of files
    std::string model;
    std::string training;
    std::string names;  // community name map
    std::string output_dir = "out";

    // [simnet]
    double superspreader_fraction = 0.01;
    double alpha = 0.05;

    // [communities]
    double resolution = 1.0;
    std::uint64_t seed = 0;

    // [propaganda]
    std::size_t chunk_tokens = 400;
    double lambda = 0.01;
    std::uint64_t train_seed = 0;
    std::size_t max_iterations = 1000;

    // [measures]
    std::string measures = "all";
    std::string k_grid;  // comma-separated, empty = default grid
    std::string frames = "all";

    // [runtime]
    std::size_t threads = 1;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t next = s.find(sep, pos);
        std::string part =
            trim(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (!part.empty()) parts.push_back(part);
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return parts;
}

template <typename T>
inline T parse_number(const std::string& value, const std::string& key) {
    std::istringstream in(value);
    T out;
    in >> out;
    if (in.fail() || !in.eof()) throw ConfigError("invalid value for " + key + ": " + value);
    return out;
}

}  // namespace detail

// Flat INI-style config: [section] headers, key = value lines, # or ;
// comments. Unknown sections or keys are rejected.
inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    PipelineConfig config;
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = detail::trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("malformed section header at line " + std::to_string(lineno));
            section = s.substr(1, s.size() - 2);
            static const std::set<std::string> known = {"paths",    "simnet",   "communities",
                                                        "propaganda", "measures", "runtime"};
            if (!known.count(section)) throw ConfigError("unknown config section: " + section);
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string value = detail::trim(s.substr(eq + 1));
        const std::string qualified = section + "." + key;

        if (qualified == "paths.tweets") config.tweets = value;
        else if (qualified == "paths.articles") config.articles = value;
        else if (qualified == "paths.signals") config.signals = value;
        else if (qualified == "paths.lexicons") config.lexicons = value;
        else if (qualified == "paths.model") config.model = value;
        else if (qualified == "paths.training") config.training = value;
        else if (qualified == "paths.names") config.names = value;
        else if (qualified == "paths.output_dir") config.output_dir = value;
        else if (qualified == "simnet.superspreader_fraction")
            config.superspreader_fraction = detail::parse_number<double>(value, qualified);
        else if (qualified == "simnet.alpha")
            config.alpha = detail::parse_number<double>(value, qualified);
        else if (qualified == "communities.resolution")
            config.resolution = detail::parse_number<double>(value, qualified);
        else if (qualified == "communities.seed")
            config.seed = detail::parse_number<std::uint64_t>(value, qualified);
        else if (qualified == "propaganda.chunk_tokens")
            config.chunk_tokens = detail::parse_number<std::size_t>(value, qualified);
        else if (qualified == "propaganda.lambda")
            config.lambda = detail::parse_number<double>(value, qualified);
        else if (qualified == "propaganda.train_seed")
            config.train_seed = detail::parse_number<std::uint64_t>(value, qualified);
        else if (qualified == "propaganda.max_iterations")
            config.max_iterations = detail::parse_number<std::size_t>(value, qualified);
        else if (qualified == "measures.measures") config.measures = value;
        else if (qualified == "measures.k_grid") config.k_grid = value;
        else if (qualified == "measures.frames") config.frames = value;
        else if (qualified == "runtime.threads")
            config.threads = detail::parse_number<std::size_t>(value, qualified);
        else throw ConfigError("unknown config key: " + qualified);
    }
    return config;
}

inline void write_config(const PipelineConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "[paths]\n";
    out << "tweets = " << config.tweets << "\n";
    if (!config.articles.empty()) out << "articles = " << config.articles << "\n";
    if (!config.signals.empty()) out << "signals = " << config.signals << "\n";
    if (!config.lexicons.empty()) out << "lexicons = " << config.lexicons << "\n";
    if (!config.model.empty()) out << "model = " << config.model << "\n";
    if (!config.training.empty()) out << "training = " << config.training << "\n";
    if (!config.names.empty()) out << "names = " << config.names << "\n";
    out << "output_dir = " << config.output_dir << "\n\n";
    out << "[simnet]\n";
    out << "superspreader_fraction = " << csv::sig10(config.superspreader_fraction) << "\n";
    out << "alpha = " << csv::sig10(config.alpha) << "\n\n";
    out << "[communities]\n";
    out << "resolution = " << csv::sig10(config.resolution) << "\n";
    out << "seed = " << config.seed << "\n\n";
    out << "[propaganda]\n";
    out << "chunk_tokens = " << config.chunk_tokens << "\n";
    out << "lambda = " << csv::sig10(config.lambda) << "\n";
    out << "train_seed = " << config.train_seed << "\n";
    out << "max_iterations = " << config.max_iterations << "\n\n";
    out << "[measures]\n";
    out << "measures = " << config.measures << "\n";
    if (!config.k_grid.empty()) out << "k_grid = " << config.k_grid << "\n";
    out << "frames = " << config.frames << "\n\n";
    out << "[runtime]\n";
    out << "threads = " << config.threads << "\n";
}

inline std::vector<double> parse_k_grid(const std::string& spec) {
    if (spec.empty()) return default_k_grid();
    std::vector<double> grid;
    for (const auto& part : detail::split_list(spec))
        grid.push_back(detail::parse_number<double>(part, "measures.k_grid"));
    if (grid.empty()) return default_k_grid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0 || grid[i] > 1.0) throw ConfigError("k grid values must be in [0,1]");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw ConfigError("k grid must be strictly increasing");
    }
    return grid;
}

inline std::vector<MeasureSpec> parse_measures(const std::string& spec) {
    if (spec.empty() || spec == "all") return default_measures();
    std::vector<MeasureSpec> measures;
    for (const auto& token : detail::split_list(spec)) measures.push_back(parse_measure(token));
    if (measures.empty()) throw ConfigError("no measures configured");
    return measures;
}

// ---------------------------------------------------------------------------
// artifact read/write

inline void write_assignment_csv(const std::string& path, const CommunityAssignment& assignment,
                                 const CoordinationScores& scores) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "user_id,community,coordination_score\n";
    for (const auto& [user, label] : assignment.labels) {
        auto it = scores.find(user);
        if (it == scores.end()) throw Error("missing coordination score for " + user);
        out << csv::escape(user) << ',' << csv::escape(assignment.display_name(label)) << ','
            << csv::fixed(it->second, 6) << '\n';
    }
}

// Rebuilds numeric labels from the stored display names: communities ordered
// by descending size, ties by smallest member id (the same rule the detector
// uses, so a round trip preserves labels).
inline std::pair<CommunityAssignment, CoordinationScores> load_assignment_csv(
    const std::string& path) {
    csv::Reader reader(path);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() != 3 || fields[0] != "user_id" ||
        fields[1] != "community" || fields[2] != "coordination_score")
        throw ParseError("assignment file must start with header user_id,community,coordination_score", 1);

    std::map<std::string, std::string> community_of;
    CoordinationScores scores;
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 3) throw ParseError("expected 3 fields", reader.line());
        community_of[fields[0]] = fields[1];
        try {
            std::size_t used = 0;
            scores[fields[0]] = std::stod(fields[2], &used);
            if (used != fields[2].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError("coordination_score must be a number", reader.line());
        }
    }

    std::map<std::string, std::pair<std::size_t, std::string>> group;  // name -> (size, min member)
    for (const auto& [user, name] : community_of) {
        auto& g = group[name];
        ++g.first;
        if (g.second.empty() || user < g.second) g.second = user;
    }
    std::vector<std::string> names;
    for (const auto& [name, info] : group) names.push_back(name);
    std::sort(names.begin(), names.end(), [&](const std::string& a, const std::string& b) {
        const auto& ga = group[a];
        const auto& gb = group[b];
        return ga.first != gb.first ? ga.first > gb.first : ga.second < gb.second;
    });

    CommunityAssignment assignment;
    assignment.community_count = static_cast<int>(names.size());
    std::map<std::string, int> label_of;
    for (std::size_t i = 0; i < names.size(); ++i) {
        label_of[names[i]] = static_cast<int>(i);
        if (names[i] != std::to_string(i)) assignment.names[static_cast<int>(i)] = names[i];
    }
    for (const auto& [user, name] : community_of) assignment.labels[user] = label_of[name];
    return {assignment, scores};
}

inline void write_item_scores_csv(const std::string& path, const std::vector<TextItem>& items,
                                  const std::vector<ItemScore>& scores) {
    if (items.size() != scores.size()) throw Error("item/score count mismatch");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "item_id,kind,owner,score,label\n";
    for (std::size_t i = 0; i < items.size(); ++i)
        out << csv::escape(items[i].item_id) << ','
            << (items[i].kind == ItemKind::article ? "article" : "tweet_chunk") << ','
            << csv::escape(items[i].owner) << ',' << csv::fixed(scores[i].score, 6) << ','
            << (scores[i].label ? '1' : '0') << '\n';
}

struct ScoredItemRow {
    std::string item_id;
    std::string kind;
    std::string owner;
    double score = 0.0;
};

inline std::vector<ScoredItemRow> load_item_scores_csv(const std::string& path) {
    csv::Reader reader(path);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() != 5 || fields[0] != "item_id" ||
        fields[1] != "kind" || fields[2] != "owner" || fields[3] != "score" || fields[4] != "label")
        throw ParseError("item score file must start with header item_id,kind,owner,score,label", 1);
    std::vector<ScoredItemRow> rows;
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 5) throw ParseError("expected 5 fields", reader.line());
        ScoredItemRow row;
        row.item_id = fields[0];
        row.kind = fields[1];
        row.owner = fields[2];
        try {
            std::size_t used = 0;
            row.score = std::stod(fields[3], &used);
            if (used != fields[3].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError("score must be a number", reader.line());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_trend_csv(const std::string& path, const std::vector<TrendSeries>& series) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "community,k,value,users,items\n";
    for (const auto& s : series)
        for (const auto& p : s.points) {
            out << csv::escape(s.community) << ',' << csv::sig10(p.k) << ',';
            if (p.defined) out << csv::fixed(p.value, 6);
            out << ',' << p.users << ',' << p.items << '\n';
        }
}

inline std::vector<TrendSeries> load_trend_csv(const std::string& path) {
    csv::Reader reader(path);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() != 5 || fields[0] != "community" || fields[1] != "k" ||
        fields[2] != "value" || fields[3] != "users" || fields[4] != "items")
        throw ParseError("trend file must start with header community,k,value,users,items", 1);
    std::vector<TrendSeries> series;
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 5) throw ParseError("expected 5 fields", reader.line());
        if (series.empty() || series.back().community != fields[0]) {
            TrendSeries s;
            s.community = fields[0];
            series.push_back(std::move(s));
        }
        TrendPoint point;
        try {
            point.k = std::stod(fields[1]);
            if (!fields[2].empty()) {
                point.value = std::stod(fields[2]);
                point.defined = true;
            }
            point.users = static_cast<std::size_t>(std::stoul(fields[3]));
            point.items = static_cast<std::size_t>(std::stoul(fields[4]));
        } catch (const std::exception&) {
            throw ParseError("malformed trend row", reader.line());
        }
        series.back().points.push_back(point);
    }
    return series;
}

inline std::map<int, std::string> load_name_map(const std::string& path) {
    csv::Reader reader(path);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() != 2 || fields[0] != "community" ||
        fields[1] != "name")
        throw ParseError("name map must start with header community,name", 1);
    std::map<int, std::string> names;
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 2) throw ParseError("expected 2 fields", reader.line());
        try {
            names[std::stoi(fields[0])] = fields[1];
        } catch (const std::exception&) {
            throw ParseError("community must be a numeric label", reader.line());
        }
    }
    return names;
}

// ---------------------------------------------------------------------------
// stages

namespace detail {

inline Corpus load_configured_corpus(const PipelineConfig& config) {
    if (config.tweets.empty()) throw ConfigError("paths.tweets is not configured");
    return load_corpus(config.tweets,
                       config.articles.empty() ? std::nullopt
                                               : std::optional<std::string>(config.articles),
                       config.signals.empty() ? std::nullopt
                                              : std::optional<std::string>(config.signals));
}

inline std::string out_path(const PipelineConfig& config, const std::string& name) {
    return config.output_dir + "/" + name;
}

inline std::vector<Lexicon> load_configured_lexicons(const PipelineConfig& config) {
    std::vector<Lexicon> lexicons;
    for (const auto& path : split_list(config.lexicons)) {
        std::string name = std::filesystem::path(path).stem().string();
        lexicons.push_back(load_lexicon(path, name));
    }
    return lexicons;
}

}  // namespace detail

inline std::vector<std::string> stage_outputs(const std::string& stage) {
    if (stage == "ingest") return {"corpus_summary.json"};
    if (stage == "network") return {"edges.csv"};
    if (stage == "communities") return {"assignment.csv"};
    if (stage == "propaganda") return {"items_tweets.csv", "items_articles.csv"};
    if (stage == "trends")
        return {"informativeness.csv", "automation.csv",
                "suspensions.csv"};  // plus per-measure files declared dynamically
    if (stage == "report")
        return {"correlation.csv", "correlation.txt", "delta.csv", "community_stats.csv",
                "trends.svg", "automation.svg", "suspensions.svg", "frames.svg"};
    return {};
}

inline void stage_ingest(const PipelineConfig& config) {
    const Corpus corpus = detail::load_configured_corpus(config);
    std::size_t linked_shares = 0;
    for (const auto& links : corpus.article_links) linked_shares += links.size();

    nlohmann::ordered_json doc;
    doc["format"] = "copra-corpus-summary";
    doc["version"] = 1;
    doc["tweets"] = corpus.tweets.size();
    doc["users"] = corpus.users.size();
    doc["duplicate_tweets_dropped"] = corpus.duplicate_tweets_dropped;
    doc["dangling_retweets"] = corpus.dangling_retweets;
    doc["articles"] = corpus.articles.size();
    doc["signals"] = corpus.signals.size();
    doc["linked_article_shares"] = linked_shares;
    std::ofstream out(detail::out_path(config, "corpus_summary.json"));
    if (!out) throw Error("cannot write corpus summary");
    out << doc.dump(1) << '\n';
}

inline void stage_network(const PipelineConfig& config) {
    const Corpus corpus = detail::load_configured_corpus(config);
    const auto users = select_superspreaders(corpus, config.superspreader_fraction);
    const auto vectors = build_retweet_vectors(corpus, users);
    const WeightedGraph net = similarity_network(vectors, config.threads);
    BackboneParams params;
    params.alpha = config.alpha;
    const WeightedGraph bb = backbone(net, params);
    bb.write_edges_csv(detail::out_path(config, "edges.csv"));
}

inline void stage_communities(const PipelineConfig& config) {
    const std::string edges = detail::out_path(config, "edges.csv");
    if (!std::filesystem::exists(edges))
        throw Error("missing artifact edges.csv (run the network stage first)");
    const WeightedGraph net = WeightedGraph::read_edges_csv(edges);
    CommunityAssignment assignment = louvain(net, config.resolution, config.seed);
    if (!config.names.empty())
        assignment = label_assignment(assignment, load_name_map(config.names));
    const CoordinationScores scores = dismantle(net);
    write_assignment_csv(detail::out_path(config, "assignment.csv"), assignment, scores);
}

inline void stage_propaganda_train(const PipelineConfig& config) {
    if (config.training.empty())
        throw ConfigError("no model file and no training corpus configured");
    if (config.model.empty()) throw ConfigError("paths.model is not configured");
    const auto items = load_training_corpus(config.training);
    const auto lexicons = detail::load_configured_lexicons(config);
    const PropagandaModel model =
        train_classifier(items, config.lambda, config.train_seed, lexicons, config.max_iterations);
    save_model(model, config.model);
}

inline void stage_propaganda_score(const PipelineConfig& config) {
    if (config.model.empty() || !std::filesystem::exists(config.model))
        throw ConfigError("no model file and no training corpus configured");
    const PropagandaModel model = load_model(config.model);
    const Corpus corpus = detail::load_configured_corpus(config);

    const std::string assignment_path = detail::out_path(config, "assignment.csv");
    if (!std::filesystem::exists(assignment_path))
        throw Error("missing artifact assignment.csv (run the communities stage first)");
    const auto [assignment, scores_unused] = load_assignment_csv(assignment_path);

    std::vector<TextItem> chunks;
    for (const auto& [user, label] : assignment.labels)
        for (auto& item : chunk_tweets(corpus, user, config.chunk_tokens))
            chunks.push_back(std::move(item));
    const auto chunk_scores = score_items(model, chunks, config.threads);
    write_item_scores_csv(detail::out_path(config, "items_tweets.csv"), chunks, chunk_scores);

    std::vector<TextItem> articles;
    for (const auto& [url, article] : corpus.articles) {
        TextItem item;
        item.item_id = url;
        item.kind = ItemKind::article;
        item.text = article.text;
        item.owner = url;
        articles.push_back(std::move(item));
    }
    const auto article_scores = score_items(model, articles, config.threads);
    write_item_scores_csv(detail::out_path(config, "items_articles.csv"), articles, article_scores);
}

inline void stage_propaganda(const PipelineConfig& config) {
    if (config.model.empty() || !std::filesystem::exists(config.model))
        stage_propaganda_train(config);
    stage_propaganda_score(config);
}

namespace detail {

// Distinct articles shared per user (tweet-linked urls).
inline std::map<std::string, std::set<std::string>> shares_by_user(const Corpus& corpus) {
    std::map<std::string, std::set<std::string>> shared;
    for (std::size_t i = 0; i < corpus.tweets.size(); ++i)
        for (const auto& url : corpus.article_links[i])
            shared[corpus.tweets[i].author_id].insert(url);
    return shared;
}

struct MeasureInputs {
    // per-user item scores for each item kind
    std::map<std::string, std::vector<double>> tweet_scores;
    std::map<std::string, std::vector<double>> article_scores;
    std::map<std::string, std::size_t> tweet_items;
    std::map<std::string, std::size_t> article_items;
};

inline MeasureInputs collect_measure_inputs(const Corpus& corpus,
                                            const CommunityAssignment& assignment,
                                            const std::vector<ScoredItemRow>& tweet_rows,
                                            const std::vector<ScoredItemRow>& article_rows) {
    MeasureInputs inputs;
    for (const auto& row : tweet_rows) {
        inputs.tweet_scores[row.owner].push_back(row.score);
        ++inputs.tweet_items[row.owner];
    }
    std::map<std::string, double> score_of_article;
    for (const auto& row : article_rows) score_of_article[row.item_id] = row.score;
    for (const auto& [user, urls] : shares_by_user(corpus)) {
        if (!assignment.labels.count(user)) continue;
        for (const auto& url : urls) {
            auto it = score_of_article.find(url);
            if (it == score_of_article.end()) continue;
            inputs.article_scores[user].push_back(it->second);
            ++inputs.article_items[user];
        }
    }
    return inputs;
}

// Communities plus a pooled pseudo-community covering every assigned user.
inline std::vector<TrendSeries> all_community_trends(
    const UserPropaganda& user_scores, const CoordinationScores& coordination,
    const CommunityAssignment& assignment, Phi phi, const std::vector<double>& k_grid,
    const std::map<std::string, std::size_t>& items_per_user) {
    std::vector<TrendSeries> series;
    for (int c = 0; c < assignment.community_count; ++c)
        series.push_back(
            community_trend(user_scores, coordination, assignment, c, phi, k_grid, &items_per_user));

    CommunityAssignment pooled;
    pooled.community_count = 1;
    pooled.names[0] = "overall";
    for (const auto& [user, label] : assignment.labels) pooled.labels[user] = 0;
    series.push_back(
        community_trend(user_scores, coordination, pooled, 0, phi, k_grid, &items_per_user));
    return series;
}

}  // namespace detail

inline void stage_trends(const PipelineConfig& config) {
    const Corpus corpus = detail::load_configured_corpus(config);
    const auto [assignment, coordination] =
        load_assignment_csv(detail::out_path(config, "assignment.csv"));
    const auto tweet_rows = load_item_scores_csv(detail::out_path(config, "items_tweets.csv"));
    const auto article_rows = load_item_scores_csv(detail::out_path(config, "items_articles.csv"));
    const auto inputs = detail::collect_measure_inputs(corpus, assignment, tweet_rows, article_rows);
    const auto k_grid = parse_k_grid(config.k_grid);
    const auto measures = parse_measures(config.measures);

    struct InfoRow {
        MeasureSpec spec;
        double informativeness;
    };
    std::vector<InfoRow> info_rows;
    for (const auto& measure : measures) {
        const bool tweets = measure.item_kind == MeasureKind::tweets;
        const auto& scores_by_user = tweets ? inputs.tweet_scores : inputs.article_scores;
        const auto& items_per_user = tweets ? inputs.tweet_items : inputs.article_items;
        const UserPropaganda user_scores = user_propaganda(scores_by_user, measure.psi);
        const auto series = detail::all_community_trends(user_scores, coordination, assignment,
                                                         measure.phi, k_grid, items_per_user);
        write_trend_csv(detail::out_path(config, "trend_" + measure.id + ".csv"), series);

        // informativeness over the real communities (pooled row excluded)
        std::vector<TrendSeries> community_only(series.begin(), series.end() - 1);
        if (community_only.size() >= 2) {
            try {
                const auto info = informativeness(community_only, measure.id);
                info_rows.push_back({measure, info.informativeness});
            } catch (const Error&) {
                // all pairs excluded: measure carries no comparative signal
            }
        }
    }

    std::sort(info_rows.begin(), info_rows.end(), [](const InfoRow& a, const InfoRow& b) {
        return a.informativeness != b.informativeness ? a.informativeness > b.informativeness
                                                      : a.spec.id < b.spec.id;
    });
    std::ofstream info(detail::out_path(config, "informativeness.csv"));
    if (!info) throw Error("cannot write informativeness.csv");
    info << "measure_id,item_kind,psi,phi,I\n";
    for (const auto& row : info_rows)
        info << row.spec.id << ',' << to_string(row.spec.item_kind) << ',' << to_string(row.spec.psi)
             << ',' << to_string(row.spec.phi) << ',' << csv::fixed(row.informativeness, 6) << '\n';

    // signal trends on the same grid, with the pooled row
    if (!corpus.signals.empty()) {
        std::map<std::string, double> automation, suspended;
        for (const auto& [user, signal] : corpus.signals) {
            automation[user] = signal.automation_score;
            suspended[user] = signal.suspended ? 1.0 : 0.0;
        }
        auto signal_series = [&](const std::map<std::string, double>& values) {
            std::vector<TrendSeries> series;
            for (int c = 0; c < assignment.community_count; ++c)
                series.push_back(signal_trend(values, coordination, assignment, c, k_grid));
            CommunityAssignment pooled;
            pooled.community_count = 1;
            pooled.names[0] = "overall";
            for (const auto& [user, label] : assignment.labels) pooled.labels[user] = 0;
            series.push_back(signal_trend(values, coordination, pooled, 0, k_grid));
            return series;
        };
        write_trend_csv(detail::out_path(config, "automation.csv"), signal_series(automation));
        write_trend_csv(detail::out_path(config, "suspensions.csv"), signal_series(suspended));
    }
}

inline void stage_report(const PipelineConfig& config) {
    const Corpus corpus = detail::load_configured_corpus(config);
    const auto [assignment, coordination] =
        load_assignment_csv(detail::out_path(config, "assignment.csv"));
    const auto measures = parse_measures(config.measures);
    const std::string head_id = measures.front().id;  // headline measure for the report
    const auto prop_trends =
        load_trend_csv(detail::out_path(config, "trend_" + head_id + ".csv"));

    std::vector<TrendSeries> automation_trends, suspension_trends;
    if (std::filesystem::exists(detail::out_path(config, "automation.csv")))
        automation_trends = load_trend_csv(detail::out_path(config, "automation.csv"));
    if (std::filesystem::exists(detail::out_path(config, "suspensions.csv")))
        suspension_trends = load_trend_csv(detail::out_path(config, "suspensions.csv"));

    std::vector<DeltaStat> deltas;
    for (const auto& trend : prop_trends) {
        try {
            deltas.push_back(delta(trend));
        } catch (const Error&) {
            // endpoint undefined for this community: no delta row
        }
    }
    const auto report = correlation_report(prop_trends, automation_trends, suspension_trends, deltas);

    {
        std::ofstream out(detail::out_path(config, "correlation.csv"));
        if (!out) throw Error("cannot write correlation.csv");
        out << "community,coordination_r,coordination_p,coordination_stars,automation_r,"
               "automation_p,automation_stars,suspensions_r,suspensions_p,suspensions_stars,"
               "delta,delta_pct\n";
        for (const auto& row : report) {
            out << csv::escape(row.community);
            auto cell = [&out](const std::optional<CorrelationCell>& c) {
                if (c) out << ',' << csv::fixed(c->r, 6) << ',' << csv::fixed(c->p, 6) << ',' << c->stars;
                else out << ",,,";
            };
            cell(row.coordination);
            cell(row.automation);
            cell(row.suspensions);
            if (row.delta) {
                out << ',' << csv::fixed(row.delta->delta, 6) << ',';
                if (row.delta->delta_pct) out << csv::fixed(*row.delta->delta_pct, 1);
            } else {
                out << ",,";
            }
            out << '\n';
        }
    }

    {
        std::ofstream out(detail::out_path(config, "correlation.txt"));
        if (!out) throw Error("cannot write correlation.txt");
        auto fmt_cell = [](const std::optional<CorrelationCell>& c) {
            if (!c) return std::string("-");
            return csv::fixed(c->r, 3) + c->stars;
        };
        out << "propaganda (" << head_id << ") correlation by community\n\n";
        std::ostringstream header;
        header << "community            coordination   automation   suspensions        delta\n";
        out << header.str();
        out << std::string(header.str().size() - 1, '-') << '\n';
        for (const auto& row : report) {
            std::string name = row.community;
            if (name.size() > 20) name = name.substr(0, 20);
            out << name << std::string(20 - name.size(), ' ');
            auto pad_cell = [&out](const std::string& s, std::size_t width) {
                out << std::string(width > s.size() ? width - s.size() : 1, ' ') << s;
            };
            pad_cell(fmt_cell(row.coordination), 13);
            pad_cell(fmt_cell(row.automation), 13);
            pad_cell(fmt_cell(row.suspensions), 13);
            if (row.delta) {
                std::string d = (row.delta->delta >= 0 ? "+" : "") + csv::fixed(row.delta->delta, 3);
                if (row.delta->delta_pct)
                    d += " (" + std::string(*row.delta->delta_pct >= 0 ? "+" : "") +
                         csv::fixed(*row.delta->delta_pct, 1) + "%)";
                pad_cell(d, 18);
            } else {
                pad_cell("-", 18);
            }
            out << '\n';
        }
    }

    {
        const auto rows = community_stats(corpus, assignment);
        const auto overall = overall_stats(corpus, assignment);
        std::ofstream out(detail::out_path(config, "community_stats.csv"));
        if (!out) throw Error("cannot write community_stats.csv");
        out << "community,users,article_shares,distinct_articles,article_pct_distinct,"
               "tweets,distinct_original_tweets,tweet_pct_distinct\n";
        auto emit = [&out](const CommunityStatsRow& row) {
            out << csv::escape(row.community) << ',' << row.users << ',' << row.article_shares << ','
                << row.distinct_articles << ',';
            if (row.article_pct_distinct) out << csv::sig10(*row.article_pct_distinct);
            out << ',' << row.tweet_count << ',' << row.distinct_original_tweets << ',';
            if (row.tweet_pct_distinct) out << csv::sig10(*row.tweet_pct_distinct);
            out << '\n';
        };
        for (const auto& row : rows) emit(row);
        emit(overall);
    }

    svg::write_trend_chart(detail::out_path(config, "trends.svg"),
                           "community propaganda vs coordination threshold (" + head_id + ")",
                           prop_trends, "P_c");
    svg::write_trend_chart(detail::out_path(config, "automation.svg"),
                           "automation vs coordination threshold", automation_trends,
                           "mean automation score");
    svg::write_trend_chart(detail::out_path(config, "suspensions.svg"),
                           "suspensions vs coordination threshold", suspension_trends,
                           "suspended fraction");

    // frame-conditioned trends, where frames and article scores exist
    std::vector<TrendSeries> frame_series;
    std::set<std::string> frames_present;
    for (const auto& [url, article] : corpus.articles)
        if (article.frame) frames_present.insert(*article.frame);
    if (!frames_present.empty() &&
        std::filesystem::exists(detail::out_path(config, "items_articles.csv"))) {
        std::map<std::string, double> article_scores;
        for (const auto& row : load_item_scores_csv(detail::out_path(config, "items_articles.csv")))
            article_scores[row.item_id] = row.score;
        std::vector<std::string> selected;
        if (config.frames.empty() || config.frames == "all")
            selected.assign(frames_present.begin(), frames_present.end());
        else
            selected = detail::split_list(config.frames);
        const auto k_grid = parse_k_grid(config.k_grid);
        for (const auto& frame : selected)
            for (int c = 0; c < assignment.community_count; ++c)
                frame_series.push_back(frame_conditioned_trend(corpus, article_scores, coordination,
                                                               assignment, c, frame, k_grid));
    }
    svg::write_trend_chart(detail::out_path(config, "frames.svg"),
                           "flagged in-frame article fraction vs coordination threshold",
                           frame_series, "flagged fraction");
}

// ---------------------------------------------------------------------------
// orchestration

inline const std::vector<std::string>& all_stages() {
    static const std::vector<std::string> stages = {"ingest",     "network", "communities",
                                                    "propaganda", "trends",  "report"};
    return stages;
}

// Runs the selected stages in pipeline order. On failure the failing stage's
// declared outputs are removed, the diagnostic names the stage, and the exit
// code is 2 for configuration errors, 1 otherwise.
inline int run_pipeline(const PipelineConfig& config, std::vector<std::string> stages) {
    if (stages.empty()) stages = all_stages();
    for (const auto& stage : stages)
        if (std::find(all_stages().begin(), all_stages().end(), stage) == all_stages().end()) {
            std::cerr << "error: unknown stage " << stage << "\n";
            return 2;
        }
    // pipeline order regardless of the order given
    std::vector<std::string> ordered;
    for (const auto& stage : all_stages())
        if (std::find(stages.begin(), stages.end(), stage) != stages.end()) ordered.push_back(stage);

    std::filesystem::create_directories(config.output_dir);
    for (const auto& stage : ordered) {
        try {
            if (stage == "ingest") stage_ingest(config);
            else if (stage == "network") stage_network(config);
            else if (stage == "communities") stage_communities(config);
            else if (stage == "propaganda") stage_propaganda(config);
            else if (stage == "trends") stage_trends(config);
            else if (stage == "report") stage_report(config);
        } catch (const std::exception& e) {
            for (const auto& name : stage_outputs(stage))
                std::filesystem::remove(detail::out_path(config, name));
            if (stage == "trends")
                for (const auto& measure : parse_measures(config.measures))
                    std::filesystem::remove(detail::out_path(config, "trend_" + measure.id + ".csv"));
            std::cerr << "error: stage " << stage << ": " << e.what() << "\n";
            return dynamic_cast<const ConfigError*>(&e) ? 2 : 1;
        }
    }
    return 0;
}

}  // namespace copra
