#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zigzag/lattice.hpp"

namespace zz {

using Spinor = Eigen::Vector2cd;  // (psi^A_n, psi^B_n)

/// Finitely supported sequence of cell spinors; element i sits at cell first + i.
struct CellSequence {
    int first = 0;
    std::vector<Spinor> cells;

    int last() const { return first + int(cells.size()) - 1; }
    Spinor at(int n) const;
};

/// How the truncated chain ends on the right.
/// Zigzag keeps N full cells (dimension 2N). Bearded drops the final B site
/// (dimension 2N-1), which removes the artificial right-edge zero mode when |zeta| < 1.
/// Auto picks Bearded for |zeta| < 1 and Zigzag otherwise.
enum class Closure { Auto, Zigzag, Bearded };

Closure resolve_closure(Closure c, const SpectralWindow& w);
const char* to_string(Closure c);
Closure parse_closure(const std::string& s);

struct FiberOperator {
    SpectralWindow window;
    int ncells = 0;
    Closure closure = Closure::Zigzag;  // always resolved
    Eigen::MatrixXcd matrix;            // basis (A0, B0, A1, B1, ...)

    int dim() const { return int(matrix.rows()); }
};

struct EdgeState {
    SpectralWindow window;
    std::vector<Spinor> amplitudes;  // n = 0 .. N-1
    double norm = 0.0;

    Eigen::VectorXcd flatten(int dim) const;
};

enum class Regime { InsideGap, AboveBands, OnBands };
const char* to_string(Regime r);

struct TransferSystem {
    cplx z;
    SpectralWindow window;
    Eigen::Matrix2cd M;
    cplx lam1, lam2;
    Spinor xi1, xi2;  // (z, zeta + lam_j)
    Regime regime = Regime::OnBands;
};

struct Spectrum {
    Eigen::VectorXd values;    // ascending
    Eigen::MatrixXcd vectors;  // columns
    double max_residual = 0.0;
};

/// Exact bulk fiber operator on a finitely supported input; the output support grows by one
/// cell on each side.
CellSequence apply_bulk_fiber(const CellSequence& psi, const SpectralWindow& w);

FiberOperator build_fiber(const SpectralWindow& w, int ncells, Closure closure = Closure::Auto);

Spectrum spectrum(const FiberOperator& op);

EdgeState flat_band_state(const SpectralWindow& w, int ncells);

TransferSystem transfer_system(cplx z, const SpectralWindow& w);

Regime classify(cplx z, const SpectralWindow& w);

/// Boundary coefficient mu(f; z, zeta) of the decaying solution, in the normalization
/// where psi_0 = (mu / z) xi1 + b0 xi2.
cplx mu_coefficient(const CellSequence& f, cplx z, const SpectralWindow& w);

/// Solves (H_sharp(kpar) - z) psi = f on the half line by the transfer recursion.
/// f must live on cells 0..ncells-1; psi is returned on the same cells.
CellSequence resolve(const CellSequence& f, cplx z, const SpectralWindow& w, int ncells);

/// <psi_bd, f> with the exact (untruncated) flat-band state.
cplx solvability_defect(const CellSequence& f, const SpectralWindow& w);

/// Fraction of |v|^2 on cells 0 .. ceil(N/4)-1.
double left_mass_fraction(const Eigen::VectorXcd& v, int ncells);

inline constexpr double kEdgeMassThreshold = 0.9;

/// Left-localized eigenvector whose energy lies strictly inside the bulk gap (|E| < dgap).
bool is_edge_state(double energy, double left_mass, const SpectralWindow& w);

struct BandRow {
    double kpar;
    int index;
    double eigenvalue;
    bool edge;
    double left_mass;
};

std::vector<BandRow> band_sweep(const std::vector<double>& kpars, int ncells,
                                Closure closure = Closure::Auto);

}  // namespace zz
