#pragma once

#include <string>
#include <vector>

namespace zz {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Symmetric Hausdorff distance between two finite real sets.
double hausdorff(const std::vector<double>& a, const std::vector<double>& b);

bool strictly_decreasing(const std::vector<double>& v);
bool strictly_increasing(const std::vector<double>& v);

/// Evaluates expressions like "2.6", "pi", "5pi/6", "-pi/3", "2*pi/3".
double parse_angle(const std::string& s);

}  // namespace zz
