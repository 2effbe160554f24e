#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

#include "copra/csv.hpp"
#include "copra/error.hpp"
#include "copra/trend.hpp"

namespace copra {

// Hand-rolled SVG line charts: one polyline run per defined stretch of a
// trend, with stroke opacity and dashing driven by the support counts (solid
// for well-supported stretches, dashed and faded for thin ones). Output is a
// pure function of the input series.
namespace svg {

namespace detail {

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1b6ca8", "#c0392b", "#1e8449", "#8e44ad",
                                   "#d68910", "#117a65", "#7b241c", "#2c3e50"};
    return colors[i % 8];
}

inline std::string num(double v) { return csv::fixed(v, 2); }

struct Run {
    std::vector<std::pair<double, double>> points;  // x, y in chart space
    std::size_t min_users = 0;
};

}  // namespace detail

inline void write_trend_chart(const std::string& path, const std::string& title,
                              const std::vector<TrendSeries>& series, const std::string& y_label) {
    const double width = 760.0, height = 480.0;
    const double left = 70.0, right = 170.0, top = 50.0, bottom = 50.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double x_max = 1.0;
    for (const auto& s : series)
        for (const auto& p : s.points) x_max = std::max(x_max, p.k);

    auto x_of = [&](double k) { return left + plot_w * (k / x_max); };
    auto y_of = [&](double v) { return top + plot_h * (1.0 - v); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(width) +
           "\" height=\"" + detail::num(height) + "\" viewBox=\"0 0 " + detail::num(width) + " " +
           detail::num(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + detail::num(left) + "\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\">" +
           title + "</text>\n";

    // grid and axes
    for (int i = 0; i <= 4; ++i) {
        const double v = static_cast<double>(i) / 4.0;
        const double y = y_of(v);
        out += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(y) + "\" x2=\"" +
               detail::num(left + plot_w) + "\" y2=\"" + detail::num(y) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + detail::num(left - 8) + "\" y=\"" + detail::num(y + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
               detail::num(v) + "</text>\n";
    }
    for (int i = 0; i <= 10; ++i) {
        const double k = x_max * static_cast<double>(i) / 10.0;
        const double x = x_of(k);
        out += "<line x1=\"" + detail::num(x) + "\" y1=\"" + detail::num(top + plot_h) + "\" x2=\"" +
               detail::num(x) + "\" y2=\"" + detail::num(top + plot_h + 5) +
               "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + detail::num(x) + "\" y=\"" + detail::num(top + plot_h + 18) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
               detail::num(k) + "</text>\n";
    }
    out += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(top) + "\" x2=\"" +
           detail::num(left) + "\" y2=\"" + detail::num(top + plot_h) +
           "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    out += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(top + plot_h) + "\" x2=\"" +
           detail::num(left + plot_w) + "\" y2=\"" + detail::num(top + plot_h) +
           "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + detail::num(left + plot_w / 2) + "\" y=\"" + detail::num(height - 10) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">coordination threshold k</text>\n";
    out += "<text x=\"18\" y=\"" + detail::num(top + plot_h / 2) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           detail::num(top + plot_h / 2) + ")\">" + y_label + "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        // split into runs of consecutive defined points
        std::vector<detail::Run> runs;
        detail::Run current;
        bool open = false;
        for (const auto& p : series[s].points) {
            if (p.defined) {
                if (!open) {
                    current = detail::Run{};
                    current.min_users = p.users;
                    open = true;
                }
                current.points.emplace_back(x_of(p.k), y_of(p.value));
                current.min_users = std::min(current.min_users, p.users);
            } else if (open) {
                runs.push_back(current);
                open = false;
            }
        }
        if (open) runs.push_back(current);

        for (const auto& run : runs) {
            std::string style;
            if (run.min_users >= 50) style = " stroke-opacity=\"1.0\"";
            else if (run.min_users >= 10) style = " stroke-opacity=\"0.7\"";
            else style = " stroke-opacity=\"0.4\" stroke-dasharray=\"6 4\"";
            if (run.points.size() == 1) {
                out += "<circle cx=\"" + detail::num(run.points[0].first) + "\" cy=\"" +
                       detail::num(run.points[0].second) + "\" r=\"3\" fill=\"" +
                       detail::palette(s) + "\"/>\n";
                continue;
            }
            out += "<polyline fill=\"none\" stroke=\"" + std::string(detail::palette(s)) +
                   "\" stroke-width=\"2\"" + style + " points=\"";
            for (std::size_t i = 0; i < run.points.size(); ++i) {
                if (i) out += ' ';
                out += detail::num(run.points[i].first) + "," + detail::num(run.points[i].second);
            }
            out += "\"/>\n";
        }

        // legend entry
        const double ly = top + 16.0 * static_cast<double>(s);
        out += "<line x1=\"" + detail::num(left + plot_w + 12) + "\" y1=\"" + detail::num(ly) +
               "\" x2=\"" + detail::num(left + plot_w + 34) + "\" y2=\"" + detail::num(ly) +
               "\" stroke=\"" + detail::palette(s) + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + detail::num(left + plot_w + 40) + "\" y=\"" + detail::num(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + series[s].community + "</text>\n";
    }
    out += "</svg>\n";

    std::ofstream file(path);
    if (!file) throw Error("cannot write " + path);
    file << out;
}

}  // namespace svg

}  // namespace copra
