#pragma once

#include <cmath>
#include <vector>

namespace sfa {

template <class F>
FringeStats fringe_stats(F yield, double lo, double hi, double step) {
    std::vector<double> x, y;
    for (double om = lo; om <= hi; om += step) {
        x.push_back(om);
        y.push_back(yield(om));
    }
    auto golden = [&](double a, double b, bool minimize) {
        const double g = 0.5 * (std::sqrt(5.0) - 1);
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = yield(c), fd = yield(d);
        for (int it = 0; it < 80; ++it) {
            if ((fc < fd) == minimize) {
                b = d, d = c, fd = fc;
                c = b - g * (b - a), fc = yield(c);
            } else {
                a = c, c = d, fc = fd;
                d = a + g * (b - a), fd = yield(d);
            }
        }
        return yield(0.5 * (a + b));
    };
    std::vector<std::pair<std::size_t, double>> mins, maxs;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] < y[i - 1] && y[i] <= y[i + 1]) mins.push_back({i, golden(x[i - 1], x[i + 1], true)});
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) maxs.push_back({i, golden(x[i - 1], x[i + 1], false)});
    }
    FringeStats st;
    double vis = 0;
    for (const auto& [i, ymin] : mins) {
        double left = -1, right = -1;
        for (const auto& [j, ymax] : maxs) {
            if (j < i) left = ymax;
            if (j > i && right < 0) right = ymax;
        }
        if (left < 0 || right < 0) continue;
        double ymax = 0.5 * (left + right);
        ++st.minima;
        vis += (ymax - ymin) / (ymax + ymin);
        st.worst_min_ratio = std::max(st.worst_min_ratio, ymin / std::min(left, right));
    }
    if (st.minima) st.mean_visibility = vis / double(st.minima);
    return st;
}

}  // namespace sfa
