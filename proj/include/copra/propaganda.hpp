#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "copra/corpus.hpp"
#include "copra/error.hpp"
#include "copra/optim.hpp"
#include "copra/parallel.hpp"
#include "copra/rng.hpp"
#include "copra/text.hpp"

namespace copra {

enum class ItemKind { article, tweet_chunk };

struct TextItem {
    std::string item_id;
    ItemKind kind = ItemKind::tweet_chunk;
    std::string text;
    std::string owner;  // user id for chunks, url for articles
};

// Concatenate a user's original tweets (retweets excluded, quoted tweets
// included) in chronological order and split into chunks. A chunk closes once
// its token count reaches target_tokens after appending a whole tweet; a final
// fragment shorter than a quarter of the target folds into the previous chunk.
inline std::vector<TextItem> chunk_tweets(const Corpus& corpus, const std::string& user,
                                          std::size_t target_tokens = 400) {
    if (target_tokens < 50) throw Error("target_tokens must be >= 50");

    std::vector<std::string> texts;  // corpus order is already (ts, id)
    for (const Tweet& t : corpus.tweets)
        if (t.author_id == user && !t.is_retweet()) texts.push_back(t.text);

    std::vector<std::string> chunks;
    std::string current;
    std::size_t current_tokens = 0;
    for (const std::string& text : texts) {
        const std::size_t tokens = text::tokenize(text).size();
        if (!current.empty()) current += ' ';
        current += text;
        current_tokens += tokens;
        if (current_tokens >= target_tokens) {
            chunks.push_back(std::move(current));
            current.clear();
            current_tokens = 0;
        }
    }
    if (!current.empty()) {
        if (current_tokens * 4 >= target_tokens || chunks.empty()) {
            chunks.push_back(std::move(current));
        } else {
            chunks.back() += ' ';
            chunks.back() += current;
        }
    }

    std::vector<TextItem> items;
    items.reserve(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        TextItem item;
        item.item_id = user + "/chunk" + std::to_string(i);
        item.kind = ItemKind::tweet_chunk;
        item.text = std::move(chunks[i]);
        item.owner = user;
        items.push_back(std::move(item));
    }
    return items;
}

struct Lexicon {
    std::string name;
    std::set<std::string> terms;
};

inline Lexicon load_lexicon(const std::string& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open lexicon file " + path);
    Lexicon lex;
    lex.name = name;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        for (char& c : line) c = text::fold(static_cast<unsigned char>(c));
        if (!line.empty()) lex.terms.insert(line);
    }
    return lex;
}

using SparseVector = std::vector<std::pair<std::size_t, double>>;  // sorted by index

// Fitted feature tables: TF-IDF vocabularies for word n-grams (unigrams and
// bigrams, minimum document frequency 2) and character 3-grams, plus lexicon
// frequencies, readability and vocabulary-richness scalars. The n-gram blocks
// are L2-normalized per document so block scales stay comparable.
class FeatureSpace {
public:
    struct Entry {
        std::string term;
        double idf;
    };

    std::vector<Entry> word_vocab;
    std::vector<Entry> char_vocab;
    std::vector<Lexicon> lexicons;
    std::size_t min_df = 2;

    std::size_t dimension() const {
        return word_vocab.size() + char_vocab.size() + lexicons.size() + kReadabilityDims +
               kRichnessDims;
    }

    static std::vector<std::string> word_ngrams(const std::vector<std::string>& tokens) {
        std::vector<std::string> grams = tokens;
        for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
            grams.push_back(tokens[i] + ' ' + tokens[i + 1]);
        return grams;
    }

    static std::vector<std::string> char_trigrams(const std::vector<std::string>& tokens) {
        std::string joined;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (i) joined += ' ';
            joined += tokens[i];
        }
        std::vector<std::string> grams;
        for (std::size_t i = 0; i + 3 <= joined.size(); ++i) grams.push_back(joined.substr(i, 3));
        return grams;
    }

    void fit(const std::vector<std::string>& texts, std::vector<Lexicon> lexicon_list) {
        lexicons = std::move(lexicon_list);
        std::map<std::string, std::size_t> word_df, char_df;
        for (const std::string& text : texts) {
            const auto tokens = text::tokenize(text);
            std::set<std::string> seen_words, seen_chars;
            for (auto& g : word_ngrams(tokens)) seen_words.insert(std::move(g));
            for (auto& g : char_trigrams(tokens)) seen_chars.insert(std::move(g));
            for (const auto& g : seen_words) ++word_df[g];
            for (const auto& g : seen_chars) ++char_df[g];
        }
        const double n = static_cast<double>(texts.size());
        word_vocab.clear();
        char_vocab.clear();
        for (const auto& [term, df] : word_df)
            if (df >= min_df) word_vocab.push_back({term, std::log(n / static_cast<double>(df))});
        for (const auto& [term, df] : char_df)
            if (df >= min_df) char_vocab.push_back({term, std::log(n / static_cast<double>(df))});
    }

    SparseVector extract(const std::string& raw_text) const {
        const auto tokens = text::tokenize(raw_text);
        SparseVector features;

        append_tfidf_block(word_ngrams(tokens), word_vocab, 0, features);
        append_tfidf_block(char_trigrams(tokens), char_vocab, word_vocab.size(), features);

        const std::size_t lex_base = word_vocab.size() + char_vocab.size();
        if (!tokens.empty()) {
            for (std::size_t l = 0; l < lexicons.size(); ++l) {
                std::size_t hits = 0;
                for (const auto& tok : tokens)
                    if (lexicons[l].terms.count(tok)) ++hits;
                if (hits > 0)
                    features.emplace_back(lex_base + l,
                                          static_cast<double>(hits) / static_cast<double>(tokens.size()));
            }
        }

        const std::size_t read_base = lex_base + lexicons.size();
        const text::Readability read = text::readability(tokens, raw_text);
        if (!read.degenerate) {
            if (read.flesch_reading_ease != 0.0)
                features.emplace_back(read_base + 0, read.flesch_reading_ease);
            if (read.fk_grade != 0.0) features.emplace_back(read_base + 1, read.fk_grade);
            if (read.gunning_fog != 0.0) features.emplace_back(read_base + 2, read.gunning_fog);
        }

        const std::size_t rich_base = read_base + kReadabilityDims;
        const text::Richness rich = text::richness(tokens);
        if (rich.ttr != 0.0) features.emplace_back(rich_base + 0, rich.ttr);
        if (rich.hapax_legomena != 0)
            features.emplace_back(rich_base + 1, static_cast<double>(rich.hapax_legomena));
        if (rich.hapax_dislegomena != 0)
            features.emplace_back(rich_base + 2, static_cast<double>(rich.hapax_dislegomena));
        return features;
    }

private:
    static constexpr std::size_t kReadabilityDims = 3;
    static constexpr std::size_t kRichnessDims = 3;

    static void append_tfidf_block(const std::vector<std::string>& grams,
                                   const std::vector<Entry>& vocab, std::size_t base,
                                   SparseVector& out) {
        if (vocab.empty() || grams.empty()) return;
        std::map<std::string, std::size_t> tf;
        for (const auto& g : grams) ++tf[g];
        std::vector<std::pair<std::size_t, double>> block;
        for (const auto& [term, count] : tf) {
            auto it = std::lower_bound(vocab.begin(), vocab.end(), term,
                                       [](const Entry& e, const std::string& t) { return e.term < t; });
            if (it == vocab.end() || it->term != term) continue;
            const double w = static_cast<double>(count) * it->idf;
            if (w != 0.0)
                block.emplace_back(base + static_cast<std::size_t>(it - vocab.begin()), w);
        }
        double norm = 0.0;
        for (const auto& [idx, w] : block) norm += w * w;
        if (norm > 0.0) {
            norm = std::sqrt(norm);
            for (auto& [idx, w] : block) w /= norm;
        }
        out.insert(out.end(), block.begin(), block.end());
    }
};

struct LabeledItem {
    std::string text;
    int label = 0;  // 0 or 1
};

// JSON Lines with `text` and `label` in {0,1}.
inline std::vector<LabeledItem> load_training_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open training file " + path);
    std::vector<LabeledItem> items;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object())
            throw ParseError("invalid JSON object", lineno);
        LabeledItem item;
        auto text_it = obj.find("text");
        if (text_it == obj.end() || !text_it->is_string())
            throw ParseError("field 'text' must be a string", lineno);
        item.text = text_it->get<std::string>();
        auto label_it = obj.find("label");
        if (label_it == obj.end() || !label_it->is_number_integer())
            throw ParseError("field 'label' must be 0 or 1", lineno);
        const auto label = label_it->get<int>();
        if (label != 0 && label != 1) throw ParseError("field 'label' must be 0 or 1", lineno);
        item.label = label;
        items.push_back(std::move(item));
    }
    return items;
}

struct PropagandaModel {
    FeatureSpace space;
    std::vector<double> weights;
    double bias = 0.0;
    double lambda = 1.0;
    std::uint64_t seed = 0;
    // Fit statistics for the numeric tail (lexicon, readability and richness
    // entries): raw values are centered and scaled before the dot product so
    // the n-gram blocks and the numeric blocks live on comparable scales.
    std::vector<double> feature_centers;
    std::vector<double> feature_scales;  // inverse std; 0 disables a feature

    std::size_t numeric_begin() const { return space.word_vocab.size() + space.char_vocab.size(); }
};

namespace detail {

inline void scale_numeric_tail(const PropagandaModel& model, SparseVector& features) {
    const std::size_t begin = model.numeric_begin();
    for (auto& [idx, v] : features) {
        if (idx < begin) continue;
        const std::size_t t = idx - begin;
        v = (v - model.feature_centers[t]) * model.feature_scales[t];
    }
}

// Mean logistic loss with L2 penalty on the weights only; the visit order
// fixes the floating-point summation order.
struct LogisticObjective {
    const std::vector<SparseVector>& features;
    const std::vector<double>& targets;  // +1 / -1
    const std::vector<std::size_t>& order;
    double lambda;
    std::size_t dim;  // weights; x has dim + 1 entries, the last is the bias

    double operator()(const std::vector<double>& x, std::vector<double>& grad) const {
        const double n = static_cast<double>(features.size());
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        for (std::size_t pos : order) {
            double z = x[dim];
            for (const auto& [idx, v] : features[pos]) z += x[idx] * v;
            const double yz = targets[pos] * z;
            // log(1 + exp(-yz)) computed stably on both tails
            if (yz > 0) loss += std::log1p(std::exp(-yz));
            else loss += -yz + std::log1p(std::exp(yz));
            const double sig = 1.0 / (1.0 + std::exp(yz));  // sigma(-yz)
            const double coeff = -targets[pos] * sig / n;
            for (const auto& [idx, v] : features[pos]) grad[idx] += coeff * v;
            grad[dim] += coeff;
        }
        loss /= n;
        double penalty = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            penalty += x[i] * x[i];
            grad[i] += lambda * x[i];
        }
        return loss + 0.5 * lambda * penalty;
    }
};

}  // namespace detail

inline PropagandaModel train_classifier(const std::vector<LabeledItem>& items, double lambda,
                                        std::uint64_t seed,
                                        const std::vector<Lexicon>& lexicons = {},
                                        std::size_t max_iterations = 1000,
                                        double tolerance = 1e-6) {
    if (lambda < 0.0) throw Error("lambda must be non-negative");
    std::size_t positives = 0;
    for (const auto& item : items)
        if (item.label == 1) ++positives;
    if (positives == 0 || positives == items.size())
        throw Error("single-class training set");

    PropagandaModel model;
    model.lambda = lambda;
    model.seed = seed;
    std::vector<std::string> texts;
    texts.reserve(items.size());
    for (const auto& item : items) texts.push_back(item.text);
    model.space.fit(texts, lexicons);

    const std::size_t dim = model.space.dimension();
    std::vector<SparseVector> features(items.size());
    std::vector<double> targets(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        features[i] = model.space.extract(items[i].text);
        targets[i] = items[i].label == 1 ? 1.0 : -1.0;
    }

    // standardize the numeric tail over the items where each entry is present
    const std::size_t numeric_begin = model.numeric_begin();
    const std::size_t tail = dim - numeric_begin;
    std::vector<double> sum(tail, 0.0), sumsq(tail, 0.0);
    std::vector<std::size_t> count(tail, 0);
    for (const auto& vec : features)
        for (const auto& [idx, v] : vec) {
            if (idx < numeric_begin) continue;
            const std::size_t t = idx - numeric_begin;
            sum[t] += v;
            sumsq[t] += v * v;
            ++count[t];
        }
    model.feature_centers.assign(tail, 0.0);
    model.feature_scales.assign(tail, 0.0);
    for (std::size_t t = 0; t < tail; ++t) {
        if (count[t] == 0) continue;
        const double mean = sum[t] / static_cast<double>(count[t]);
        const double var = std::max(0.0, sumsq[t] / static_cast<double>(count[t]) - mean * mean);
        model.feature_centers[t] = mean;
        model.feature_scales[t] = var > 1e-24 ? 1.0 / std::sqrt(var) : 0.0;
    }
    for (auto& vec : features) detail::scale_numeric_tail(model, vec);

    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    detail::LogisticObjective objective{features, targets, order, lambda, dim};
    OptimResult fit = lbfgs_minimize(
        [&objective](const std::vector<double>& x, std::vector<double>& g) { return objective(x, g); },
        std::vector<double>(dim + 1, 0.0), max_iterations, tolerance);

    model.weights.assign(fit.x.begin(), fit.x.begin() + static_cast<std::ptrdiff_t>(dim));
    model.bias = fit.x[dim];
    return model;
}

struct ItemScore {
    std::string item_id;
    double score = 0.5;  // posterior in [0,1]
    bool label = false;  // score > 0.5
};

inline ItemScore score_item(const PropagandaModel& model, const TextItem& item) {
    SparseVector features = model.space.extract(item.text);
    detail::scale_numeric_tail(model, features);
    double z = model.bias;
    for (const auto& [idx, v] : features) z += model.weights[idx] * v;
    ItemScore score;
    score.item_id = item.item_id;
    score.score = 1.0 / (1.0 + std::exp(-z));
    score.label = score.score > 0.5;
    return score;
}

inline std::vector<ItemScore> score_items(const PropagandaModel& model,
                                          const std::vector<TextItem>& items,
                                          std::size_t threads = 1) {
    std::vector<ItemScore> scores(items.size());
    parallel_for(items.size(), threads, [&](std::size_t i) { scores[i] = score_item(model, items[i]); });
    return scores;
}

// Versioned JSON model file; doubles survive the round trip exactly.
inline void save_model(const PropagandaModel& model, const std::string& path) {
    nlohmann::ordered_json doc;
    doc["format"] = "copra-model";
    doc["version"] = 1;
    doc["lambda"] = model.lambda;
    doc["seed"] = model.seed;
    doc["min_df"] = model.space.min_df;
    auto vocab_json = [](const std::vector<FeatureSpace::Entry>& vocab) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& e : vocab) arr.push_back({e.term, e.idf});
        return arr;
    };
    doc["word_ngrams"] = vocab_json(model.space.word_vocab);
    doc["char_trigrams"] = vocab_json(model.space.char_vocab);
    nlohmann::ordered_json lex = nlohmann::ordered_json::array();
    for (const auto& l : model.space.lexicons) {
        nlohmann::ordered_json terms = nlohmann::ordered_json::array();
        for (const auto& t : l.terms) terms.push_back(t);
        lex.push_back({{"name", l.name}, {"terms", terms}});
    }
    doc["lexicons"] = lex;
    doc["feature_centers"] = model.feature_centers;
    doc["feature_scales"] = model.feature_scales;
    doc["bias"] = model.bias;
    doc["weights"] = model.weights;

    std::ofstream out(path);
    if (!out) throw Error("cannot write model file " + path);
    out << doc.dump(1) << '\n';
}

inline PropagandaModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file " + path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error("model file is not valid JSON: " + path);
    if (doc.value("format", "") != "copra-model") throw Error("not a model file: " + path);
    if (doc.value("version", 0) != 1) throw Error("unsupported model version in " + path);

    PropagandaModel model;
    model.lambda = doc.at("lambda").get<double>();
    model.seed = doc.at("seed").get<std::uint64_t>();
    model.space.min_df = doc.at("min_df").get<std::size_t>();
    auto read_vocab = [&](const char* key) {
        std::vector<FeatureSpace::Entry> vocab;
        for (const auto& pair : doc.at(key))
            vocab.push_back({pair.at(0).get<std::string>(), pair.at(1).get<double>()});
        return vocab;
    };
    model.space.word_vocab = read_vocab("word_ngrams");
    model.space.char_vocab = read_vocab("char_trigrams");
    for (const auto& l : doc.at("lexicons")) {
        Lexicon lex;
        lex.name = l.at("name").get<std::string>();
        for (const auto& t : l.at("terms")) lex.terms.insert(t.get<std::string>());
        model.space.lexicons.push_back(std::move(lex));
    }
    model.feature_centers = doc.at("feature_centers").get<std::vector<double>>();
    model.feature_scales = doc.at("feature_scales").get<std::vector<double>>();
    model.bias = doc.at("bias").get<double>();
    model.weights = doc.at("weights").get<std::vector<double>>();
    if (model.weights.size() != model.space.dimension())
        throw Error("model weight dimension mismatch in " + path);
    if (model.feature_centers.size() != model.space.dimension() - model.numeric_begin() ||
        model.feature_scales.size() != model.feature_centers.size())
        throw Error("model scaling dimension mismatch in " + path);
    return model;
}

}  // namespace copra
