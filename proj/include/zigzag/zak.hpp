#pragma once

#include <utility>
#include <vector>

#include "zigzag/tightbinding.hpp"

namespace zz {

enum class Branch { Plus, Minus };

struct ZakResult {
    double kpar = 0.0;
    double phase = 0.0;       // 2 pi * winding
    int winding = 0;
    double raw_phase = 0.0;   // trapezoidal quadrature of the Berry connection
};

/// Bulk 2x2 symbol [[0, conj(h)], [h, 0]] with h = zeta + exp(i kperp).
Eigen::Matrix2cd bulk_symbol(double kperp, const SpectralWindow& w);

/// mu = +-|h|, spinor (1, +-h/|h|)/sqrt(2).
std::pair<double, Spinor> bloch_eigenpair(double kperp, const SpectralWindow& w, Branch b);

/// Winding of the loop from spinor samples, using the gauge-invariant ratio xi_B / xi_A.
int winding_from_spinors(const std::vector<Spinor>& samples);

ZakResult zak_phase(const SpectralWindow& w, int npoints = 512);

}  // namespace zz
