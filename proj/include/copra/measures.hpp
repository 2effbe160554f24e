#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "copra/assignment.hpp"
#include "copra/corpus.hpp"
#include "copra/error.hpp"
#include "copra/stats.hpp"
#include "copra/trend.hpp"

namespace copra {

enum class Psi { median, mean, majority_voting, max };
enum class Phi { mean, median, ratio };
enum class MeasureKind { tweets, articles };

inline std::string to_string(Psi psi) {
    switch (psi) {
        case Psi::median: return "median";
        case Psi::mean: return "mean";
        case Psi::majority_voting: return "majority_voting";
        case Psi::max: return "max";
    }
    return "";
}

inline std::string to_string(Phi phi) {
    switch (phi) {
        case Phi::mean: return "mean";
        case Phi::median: return "median";
        case Phi::ratio: return "ratio";
    }
    return "";
}

inline std::string to_string(MeasureKind kind) {
    return kind == MeasureKind::tweets ? "tweets" : "articles";
}

inline Psi parse_psi(const std::string& s) {
    if (s == "median") return Psi::median;
    if (s == "mean") return Psi::mean;
    if (s == "majority_voting") return Psi::majority_voting;
    if (s == "max") return Psi::max;
    throw Error("unknown psi aggregator: " + s);
}

inline Phi parse_phi(const std::string& s) {
    if (s == "mean") return Phi::mean;
    if (s == "median") return Phi::median;
    if (s == "ratio") return Phi::ratio;
    throw Error("unknown phi aggregator: " + s);
}

inline MeasureKind parse_measure_kind(const std::string& s) {
    if (s == "tweets") return MeasureKind::tweets;
    if (s == "articles") return MeasureKind::articles;
    throw Error("unknown item kind: " + s);
}

struct MeasureSpec {
    std::string id;
    MeasureKind item_kind = MeasureKind::tweets;
    Psi psi = Psi::median;
    Phi phi = Phi::mean;
};

// The fixed measure family M1..M24: item kinds (tweets, articles) major, then
// psi in (median, majority_voting, mean, max), then phi in (mean, median,
// ratio). M1 is tweets/median/mean.
inline std::vector<MeasureSpec> default_measures() {
    static const MeasureKind kinds[] = {MeasureKind::tweets, MeasureKind::articles};
    static const Psi psis[] = {Psi::median, Psi::majority_voting, Psi::mean, Psi::max};
    static const Phi phis[] = {Phi::mean, Phi::median, Phi::ratio};
    std::vector<MeasureSpec> measures;
    int n = 1;
    for (MeasureKind kind : kinds)
        for (Psi psi : psis)
            for (Phi phi : phis) {
                MeasureSpec m;
                m.id = "M" + std::to_string(n++);
                m.item_kind = kind;
                m.psi = psi;
                m.phi = phi;
                measures.push_back(m);
            }
    return measures;
}

// Accepts either an id from the default family ("M7") or an explicit
// kind:psi:phi triple ("tweets:median:mean").
inline MeasureSpec parse_measure(const std::string& token) {
    for (const MeasureSpec& m : default_measures())
        if (m.id == token) return m;
    const auto first = token.find(':');
    const auto second = first == std::string::npos ? std::string::npos : token.find(':', first + 1);
    if (second == std::string::npos) throw Error("unknown measure: " + token);
    MeasureSpec m;
    m.item_kind = parse_measure_kind(token.substr(0, first));
    m.psi = parse_psi(token.substr(first + 1, second - first - 1));
    m.phi = parse_phi(token.substr(second + 1));
    m.id = token;
    return m;
}

namespace detail {

inline double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace detail

inline double aggregate_psi(const std::vector<double>& scores, Psi psi) {
    if (scores.empty()) throw Error("cannot aggregate zero scores");
    switch (psi) {
        case Psi::median: return detail::median_of(scores);
        case Psi::mean: {
            double sum = 0.0;
            for (double s : scores) sum += s;
            return sum / static_cast<double>(scores.size());
        }
        case Psi::majority_voting: {
            std::size_t positive = 0;
            for (double s : scores)
                if (s > 0.5) ++positive;
            const double frac = static_cast<double>(positive) / static_cast<double>(scores.size());
            if (frac > 0.5) return 1.0;
            if (frac < 0.5) return 0.0;
            return 0.5;
        }
        case Psi::max: return *std::max_element(scores.begin(), scores.end());
    }
    throw Error("unreachable psi");
}

using UserPropaganda = std::map<std::string, double>;

// P_u per user; users with no scored items are absent from the result.
inline UserPropaganda user_propaganda(const std::map<std::string, std::vector<double>>& scores_by_user,
                                      Psi psi) {
    UserPropaganda out;
    for (const auto& [user, scores] : scores_by_user)
        if (!scores.empty()) out[user] = aggregate_psi(scores, psi);
    return out;
}

inline double aggregate_phi(const std::vector<double>& user_scores, Phi phi) {
    if (user_scores.empty()) throw Error("cannot aggregate zero users");
    switch (phi) {
        case Phi::mean: {
            double sum = 0.0;
            for (double s : user_scores) sum += s;
            return sum / static_cast<double>(user_scores.size());
        }
        case Phi::median: return detail::median_of(user_scores);
        case Phi::ratio: {
            std::size_t above = 0;
            for (double s : user_scores)
                if (s > 0.5) ++above;
            return static_cast<double>(above) / static_cast<double>(user_scores.size());
        }
    }
    throw Error("unreachable phi");
}

// P_c(community, k) over the grid: at each threshold, aggregate P_u over
// members whose coordination score reaches k. Points with no qualifying users
// are marked undefined. items_per_user, when given, feeds the item support
// counts.
inline TrendSeries community_trend(const UserPropaganda& user_scores,
                                   const CoordinationScores& coordination,
                                   const CommunityAssignment& assignment, int community, Phi phi,
                                   const std::vector<double>& k_grid,
                                   const std::map<std::string, std::size_t>* items_per_user = nullptr) {
    if (community < 0 || community >= assignment.community_count)
        throw Error("unknown community label " + std::to_string(community));
    std::vector<std::string> members;
    for (const auto& [user, label] : assignment.labels)
        if (label == community) members.push_back(user);

    TrendSeries series;
    series.community = assignment.display_name(community);
    for (double k : k_grid) {
        TrendPoint point;
        point.k = k;
        std::vector<double> included;
        for (const auto& user : members) {
            auto c = coordination.find(user);
            if (c == coordination.end() || c->second < k) continue;
            auto p = user_scores.find(user);
            if (p == user_scores.end()) continue;
            included.push_back(p->second);
            ++point.users;
            if (items_per_user) {
                auto it = items_per_user->find(user);
                if (it != items_per_user->end()) point.items += it->second;
            }
        }
        if (!included.empty()) {
            point.defined = true;
            point.value = aggregate_phi(included, phi);
        }
        series.points.push_back(point);
    }
    return series;
}

struct InformativenessResult {
    std::string measure_id;
    double r_bar = 0.0;
    double informativeness = 0.0;  // (1 - r_bar) / 2
    std::vector<std::string> excluded_pairs;  // "c1/c2: reason"
};

// Mean pairwise Pearson correlation between community trends, over unordered
// pairs restricted to grid points where both trends are defined. Pairs with
// fewer than three common points, or with a constant trend, are excluded and
// reported.
inline InformativenessResult informativeness(const std::vector<TrendSeries>& trends,
                                             const std::string& measure_id = "") {
    if (trends.size() < 2) throw Error("need at least two community trends");
    InformativenessResult result;
    result.measure_id = measure_id;
    double sum_r = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < trends.size(); ++i) {
        for (std::size_t j = i + 1; j < trends.size(); ++j) {
            std::vector<double> xs, ys;
            for (const auto& pa : trends[i].points) {
                const TrendPoint* pb = trends[j].at_k(pa.k);
                if (pa.defined && pb && pb->defined) {
                    xs.push_back(pa.value);
                    ys.push_back(pb->value);
                }
            }
            const std::string pair_name = trends[i].community + "/" + trends[j].community;
            if (xs.size() < 3) {
                result.excluded_pairs.push_back(pair_name + ": fewer than 3 common points");
                continue;
            }
            try {
                sum_r += pearson(xs, ys).r;
                ++pairs;
            } catch (const Error&) {
                result.excluded_pairs.push_back(pair_name + ": constant trend");
            }
        }
    }
    if (pairs == 0) throw Error("all community pairs excluded from informativeness");
    result.r_bar = sum_r / static_cast<double>(pairs);
    result.informativeness = (1.0 - result.r_bar) / 2.0;
    return result;
}

// delta = P_c(0.9) - P_c(0); percentage relative to the k=0 baseline.
inline DeltaStat delta(const TrendSeries& trend) {
    const TrendPoint* lo = trend.at_k(0.0);
    const TrendPoint* hi = trend.at_k(0.9);
    if (!lo || !lo->defined) throw Error("delta endpoint undefined at k=0");
    if (!hi || !hi->defined) throw Error("delta endpoint undefined at k=0.9");
    DeltaStat stat;
    stat.community = trend.community;
    stat.delta = hi->value - lo->value;
    if (lo->value != 0.0) stat.delta_pct = 100.0 * stat.delta / lo->value;
    return stat;
}

// Fraction of in-frame articles flagged as propagandistic among the articles
// shared by community members with coordination >= k. Articles without a
// score are ignored. Undefined where no qualifying in-frame article exists.
inline TrendSeries frame_conditioned_trend(const Corpus& corpus,
                                           const std::map<std::string, double>& article_scores,
                                           const CoordinationScores& coordination,
                                           const CommunityAssignment& assignment, int community,
                                           const std::string& frame,
                                           const std::vector<double>& k_grid) {
    if (community < 0 || community >= assignment.community_count)
        throw Error("unknown community label " + std::to_string(community));
    bool frame_known = false;
    for (const auto& [url, article] : corpus.articles)
        if (article.frame && *article.frame == frame) frame_known = true;
    if (!frame_known) throw Error("unknown frame label: " + frame);

    // per member: distinct in-frame scored articles they shared
    std::map<std::string, std::set<std::string>> shared_by_user;
    for (std::size_t i = 0; i < corpus.tweets.size(); ++i) {
        const Tweet& t = corpus.tweets[i];
        auto member = assignment.labels.find(t.author_id);
        if (member == assignment.labels.end() || member->second != community) continue;
        for (const auto& url : corpus.article_links[i]) {
            const Article& article = corpus.articles.at(url);
            if (!article.frame || *article.frame != frame) continue;
            if (!article_scores.count(url)) continue;
            shared_by_user[t.author_id].insert(url);
        }
    }

    TrendSeries series;
    series.community = assignment.display_name(community) + "/" + frame;
    for (double k : k_grid) {
        TrendPoint point;
        point.k = k;
        std::set<std::string> in_frame;
        for (const auto& [user, urls] : shared_by_user) {
            auto c = coordination.find(user);
            if (c == coordination.end() || c->second < k) continue;
            ++point.users;
            in_frame.insert(urls.begin(), urls.end());
        }
        point.items = in_frame.size();
        if (!in_frame.empty()) {
            std::size_t flagged = 0;
            for (const auto& url : in_frame)
                if (article_scores.at(url) > 0.5) ++flagged;
            point.defined = true;
            point.value = static_cast<double>(flagged) / static_cast<double>(in_frame.size());
        }
        series.points.push_back(point);
    }
    return series;
}

}  // namespace copra
