#include "zigzag/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zigzag/error.hpp"
#include "zigzag/lattice.hpp"

namespace zz {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw Error(ErrorKind::Validation, "fit_line needs >= 2 points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = y[i] - (f.slope * x[i] + f.intercept);
        ssr += d * d;
    }
    f.r2 = syy > 0 ? 1.0 - ssr / syy : 1.0;
    return f;
}

double hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    auto directed = [](const std::vector<double>& p, const std::vector<double>& q) {
        double worst = 0.0;
        for (double x : p) {
            double best = std::numeric_limits<double>::infinity();
            for (double y : q) best = std::min(best, std::abs(x - y));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

double parse_angle(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c)) && c != '*') s += c;
    if (s.empty()) throw Error(ErrorKind::Validation, "empty angle");
    const auto p = s.find("pi");
    if (p == std::string::npos) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (...) {
            used = 0;
        }
        if (used != s.size()) throw Error(ErrorKind::Validation, "bad number '" + raw + "'");
        return v;
    }
    std::string head = s.substr(0, p), tail = s.substr(p + 2);
    double coef = 1.0;
    if (head == "-") coef = -1.0;
    else if (!head.empty() && head != "+") coef = parse_angle(head);
    double den = 1.0;
    if (!tail.empty()) {
        if (tail[0] != '/') throw Error(ErrorKind::Validation, "bad angle '" + raw + "'");
        den = parse_angle(tail.substr(1));
    }
    return coef * kPi / den;
}

}  // namespace zz
