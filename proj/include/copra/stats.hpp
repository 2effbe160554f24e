#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "copra/assignment.hpp"
#include "copra/error.hpp"
#include "copra/trend.hpp"

namespace copra {

namespace detail {

// Continued fraction for the incomplete beta function, modified Lentz method.
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-12;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b), accurate to about 1e-12.
inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::betacf(a, b, x) / a;
    return 1.0 - bt * detail::betacf(b, a, 1.0 - x) / b;
}

// Two-sided tail probability of Student's t: P(|T| >= |t|) with df degrees.
inline double student_t_two_sided(double t, double df) {
    if (df <= 0.0) throw Error("degrees of freedom must be positive");
    const double x = df / (df + t * t);
    return incomplete_beta(0.5 * df, 0.5, x);
}

inline double student_t_cdf(double t, double df) {
    const double p = student_t_two_sided(t, df);
    return t >= 0.0 ? 1.0 - 0.5 * p : 0.5 * p;
}

struct PearsonResult {
    double r = 0.0;
    double p = 1.0;
};

// Sample Pearson correlation with a two-sided p-value from the t
// transformation t = r * sqrt((n-2) / (1-r^2)), df = n-2.
inline PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw Error("series length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw Error("need at least 3 points");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw Error("constant series");

    PearsonResult result;
    result.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    if (std::fabs(result.r) >= 1.0) {
        result.p = 0.0;
    } else {
        const double df = static_cast<double>(n - 2);
        const double t = result.r * std::sqrt(df / (1.0 - result.r * result.r));
        result.p = student_t_two_sided(t, df);
    }
    return result;
}

// *** p<0.01, ** p<0.05, * p<0.1.
inline std::string significance_stars(double p) {
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.1) return "*";
    return "";
}

// Mean of a per-user signal over community members with coordination >= k and
// an available signal value; suspension trends pass 0/1 values. The item
// support count is not meaningful for signals and stays 0.
inline TrendSeries signal_trend(const std::map<std::string, double>& values,
                                const CoordinationScores& coordination,
                                const CommunityAssignment& assignment, int community,
                                const std::vector<double>& k_grid) {
    if (community < 0 || community >= assignment.community_count)
        throw Error("unknown community label " + std::to_string(community));
    std::vector<std::string> members;
    for (const auto& [user, label] : assignment.labels)
        if (label == community) members.push_back(user);

    bool any_signal = false;
    for (const auto& user : members)
        if (values.count(user)) any_signal = true;
    if (!any_signal) throw Error("no signals available for community");

    TrendSeries series;
    series.community = assignment.display_name(community);
    for (double k : k_grid) {
        TrendPoint point;
        point.k = k;
        double sum = 0.0;
        for (const auto& user : members) {
            auto c = coordination.find(user);
            if (c == coordination.end() || c->second < k) continue;
            auto v = values.find(user);
            if (v == values.end()) continue;
            sum += v->second;
            ++point.users;
        }
        if (point.users > 0) {
            point.defined = true;
            point.value = sum / static_cast<double>(point.users);
        }
        series.points.push_back(point);
    }
    return series;
}

struct CorrelationCell {
    double r = 0.0;
    double p = 1.0;
    std::string stars;
};

struct CorrelationEntry {
    std::string community;
    std::optional<CorrelationCell> coordination;  // trend values vs the k grid
    std::optional<CorrelationCell> automation;    // trend values vs automation trend
    std::optional<CorrelationCell> suspensions;
    std::optional<DeltaStat> delta;
};

namespace detail {

inline std::optional<CorrelationCell> paired_cell(const TrendSeries& a, const TrendSeries& b) {
    std::vector<double> xs, ys;
    for (const auto& pa : a.points) {
        const TrendPoint* pb = b.at_k(pa.k);
        if (pa.defined && pb && pb->defined) {
            xs.push_back(pa.value);
            ys.push_back(pb->value);
        }
    }
    if (xs.size() < 3) return std::nullopt;
    try {
        const PearsonResult res = pearson(xs, ys);
        return CorrelationCell{res.r, res.p, significance_stars(res.p)};
    } catch (const Error&) {
        return std::nullopt;  // constant series: cell left blank
    }
}

inline std::optional<CorrelationCell> grid_cell(const TrendSeries& a) {
    std::vector<double> xs, ys;
    for (const auto& pa : a.points) {
        if (!pa.defined) continue;
        xs.push_back(pa.k);
        ys.push_back(pa.value);
    }
    if (xs.size() < 3) return std::nullopt;
    try {
        const PearsonResult res = pearson(xs, ys);
        return CorrelationCell{res.r, res.p, significance_stars(res.p)};
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace detail

// One row per propaganda trend: correlation of the trend against the
// coordination thresholds themselves, against the automation trend and against
// the suspension trend, plus the delta columns. Degenerate cells (under three
// common points, constant series) are left blank instead of failing the whole
// report. Series are matched by community name.
inline std::vector<CorrelationEntry> correlation_report(
    const std::vector<TrendSeries>& propaganda_trends,
    const std::vector<TrendSeries>& automation_trends,
    const std::vector<TrendSeries>& suspension_trends, const std::vector<DeltaStat>& deltas) {
    auto find = [](const std::vector<TrendSeries>& list, const std::string& name) -> const TrendSeries* {
        for (const auto& s : list)
            if (s.community == name) return &s;
        return nullptr;
    };

    std::vector<CorrelationEntry> rows;
    for (const auto& trend : propaganda_trends) {
        CorrelationEntry row;
        row.community = trend.community;
        row.coordination = detail::grid_cell(trend);
        if (const TrendSeries* s = find(automation_trends, trend.community))
            row.automation = detail::paired_cell(trend, *s);
        if (const TrendSeries* s = find(suspension_trends, trend.community))
            row.suspensions = detail::paired_cell(trend, *s);
        for (const auto& d : deltas)
            if (d.community == trend.community) row.delta = d;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace copra
