#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace zz {

enum class WellShape { Disc, SmoothBump };

const char* to_string(WellShape s);
WellShape parse_well_shape(const std::string& s);

struct AtomicWell {
    WellShape shape = WellShape::Disc;
    double r0 = 0.18;

    /// Profile V0(r) in [-1, 0], supported in r < r0.
    double V(double r) const;
};

/// Validates 0 < r0 < 0.33 |e|.
AtomicWell make_well(WellShape shape, double r0);

/// Radial grid: uniform inside the well (with a face at r0), geometric growth outside up to
/// a capped step, out to 8 max(1, 10/lambda). `refine` scales every spacing by 1/refine.
struct RadialOptions {
    int inner_cells = 3000;
    double growth = 1.01;
    double max_step = 1e-4;
    double refine = 1.0;
};

struct GroundState {
    double lambda = 0.0;
    double E0 = 0.0;
    std::vector<double> r;   // cell centres
    std::vector<double> p0;  // radial profile, 2 pi int p0^2 r dr = 1
    std::vector<double> w;   // cell weights int r dr
    double decay_rate = 0.0; // -d log p0 / dr fitted outside 2 r0
    double residual = 0.0;   // relative eigen residual of the radial operator
    double outer_radius = 0.0;

    /// Interpolated p0 at radius r (zero beyond the grid).
    double operator()(double r) const;

    struct Interp;
    std::shared_ptr<const Interp> interp;
};

GroundState ground_state(const AtomicWell& well, double lambda, const RadialOptions& opt = {});

/// k-th eigenvalue (k = 0, 1, ...) of the radial operator in angular channel m.
double radial_eigenvalue(const AtomicWell& well, double lambda, int m, int k,
                         const RadialOptions& opt = {});

/// min(second m=0 level, first m=1 level, 0) - E0.
double spectral_gap(const AtomicWell& well, double lambda, const RadialOptions& opt = {});

/// Disc-well ground energy from the Bessel matching condition
/// k J1(k r0)/J0(k r0) = kappa K1(kappa r0)/K0(kappa r0).
double bessel_ground_energy(double r0, double lambda);

struct HoppingCoefficient {
    double lambda = 0.0;
    double rho = 0.0;
    double quadrature_error_estimate = 0.0;
};

/// int_{|y|<r0} p0(y) lambda^2 |V0(y)| p0(y - e) dy.
HoppingCoefficient hopping_rho(const GroundState& gs, const AtomicWell& well);

/// int p0(y - [sigma e + r.v]) lambda^2 |V0(y)| p0(y - [sigma2 e + r2.v]) dy, r.v = r1 v1 + r2 v2.
double overlap_integral(const GroundState& gs, const AtomicWell& well, int sigma,
                        std::array<int, 2> r, int sigma2, std::array<int, 2> r2);

}  // namespace zz
