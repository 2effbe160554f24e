#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace copra {

struct TrendPoint {
    double k = 0.0;
    double value = 0.0;
    bool defined = false;  // false where no users/items qualify
    std::size_t users = 0;
    std::size_t items = 0;
};

struct TrendSeries {
    std::string community;
    std::vector<TrendPoint> points;  // k strictly increasing

    const TrendPoint* at_k(double k) const {
        for (const auto& p : points)
            if (p.k == k) return &p;
        return nullptr;
    }
};

struct DeltaStat {
    std::string community;
    double delta = 0.0;                // P_c(0.9) - P_c(0)
    std::optional<double> delta_pct;   // 100 * delta / P_c(0), absent at baseline 0
};

// {0.00, 0.05, ..., 0.95}; multiples of 5/100 so 0.9 is the exact double 0.9.
inline std::vector<double> default_k_grid() {
    std::vector<double> grid;
    for (int i = 0; i < 20; ++i) grid.push_back(static_cast<double>(i * 5) / 100.0);
    return grid;
}

}  // namespace copra
