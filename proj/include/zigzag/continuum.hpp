#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "zigzag/atomic.hpp"
#include "zigzag/lattice.hpp"
#include "zigzag/tightbinding.hpp"

namespace zz {

using SparseC = Eigen::SparseMatrix<cplx>;

/// Triangular mesh with nodes (i v1 + j v2) / p on the cylinder R^2 / Z v2.
/// Node rows i run over cells -pad_left .. ncells + pad_right - 1 (p rows per cell),
/// j is periodic mod p, and the field vanishes beyond both ends in i.
struct CylinderGrid {
    int ncells = 0;
    int p = 0;
    int pad_left = 0;
    int pad_right = 0;

    int imin() const { return -pad_left * p; }
    int imax() const { return (ncells + pad_right) * p - 1; }
    int rows() const { return imax() - imin() + 1; }
    std::size_t size() const { return std::size_t(rows()) * p; }
    double h() const { return 1.0 / p; }
    double node_area() const;
    std::size_t index(int i, int j) const;
    int row_of(std::size_t idx) const { return int(idx / p) + imin(); }
    int col_of(std::size_t idx) const { return int(idx % p); }
    Vec2 coord(std::size_t idx) const;
};

inline constexpr std::size_t kMaxGridNodes = 4'000'000;

CylinderGrid build_grid(int ncells, std::array<int, 2> points_per_cell, int pad_left,
                        int pad_right = 2);

/// Ground state of the same discrete operator for one well on a hexagonal patch.
struct DiscreteAtom {
    int p = 0;
    int M = 0;  // patch radius in nodes
    double E0 = 0.0;
    std::vector<double> values;  // (2M+1)^2, area-normalized, zero outside the hexagon

    double at(int di, int dj) const;
};

DiscreteAtom discrete_atom(const AtomicWell& well, double lambda, int p, double radius = 3.0);

/// Cell-averaged well profile at distance d from the centre, for node spacing h.
double smoothed_well(const AtomicWell& well, double d, double h);

struct SiteRef {
    Sublattice sub;
    int n;
    double i, j;  // fractional node coordinates
};

struct CylinderProblem {
    CylinderGrid grid;
    AtomicWell well;
    DiscreteAtom atom;
    double lambda = 0.0;
    double kpar = 0.0;
    Closure closure = Closure::Zigzag;
    std::vector<SiteRef> sites;
    SparseC H;  // -(grad + i a)^2 + lambda^2 V_sharp - E0 (discrete)

    int tb_dim() const { return int(sites.size()); }
};

/// Uses the provided discrete atom if its (p, lambda) match, else builds one.
CylinderProblem assemble_fiber(const CylinderGrid& grid, const AtomicWell& well, double lambda,
                               double kpar, Closure closure = Closure::Auto,
                               const DiscreteAtom* atom = nullptr, bool include_sites = true);

struct OrbitalBasis {
    std::vector<SiteRef> sites;  // same order as the tight-binding basis
    Eigen::MatrixXcd vectors;    // one column per site
    Eigen::MatrixXcd gram;       // area-weighted inner products
    Eigen::MatrixXcd energy;     // <p_a, H p_b>
    double max_offdiag = 0.0;
    double max_diag_defect = 0.0;
    double max_residual = 0.0;   // max ||H p|| / ||p||
};

inline constexpr int kOrbitalImages = 3;

OrbitalBasis orbital_basis(const CylinderProblem& prob);

struct SparseEigs {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd residuals;
    int iterations = 0;
};

inline constexpr std::size_t kDenseFallback = 800;

/// nev eigenpairs of a Hermitian matrix nearest sigma, sorted ascending.
SparseEigs shift_invert_eigs(const SparseC& H, double sigma, int nev, double tol = 1e-8,
                             int maxit = 500);

struct ScaledEnergy {
    double E = 0.0;
    double E0 = 0.0;
    double rho = 0.0;
    double omega_tilde = 0.0;
};

struct ContinuumState {
    ScaledEnergy energy;
    bool edge = false;
    double left_mass = 0.0;
    double residual = 0.0;
    Eigen::VectorXcd vector;
};

double continuum_left_mass(const CylinderGrid& grid, const Eigen::VectorXcd& v);

std::vector<ContinuumState> edge_eigensolve(const CylinderProblem& prob, double rho, int nev);

/// Area-normalized sum_n (-zeta)^n p_A[n].
Eigen::VectorXcd tb_ansatz(const CylinderProblem& prob, const OrbitalBasis& basis);

double scaled_spectrum_distance(const std::vector<double>& omegas, const Eigen::VectorXd& tb);

}  // namespace zz

namespace zz {

struct ContinuumConfig {
    AtomicWell well{};
    int ncells = 12;
    int resolution = 48;  // mesh nodes per lattice unit along v1 and v2
    int pad_left = 2;
    int pad_right = 2;
    int nev = 0;          // 0 selects the tight-binding dimension
    Closure closure = Closure::Auto;
    double eig_tol = 1e-8;
};

struct ContinuumRun {
    double lambda = 0.0;
    double kpar = 0.0;
    double E0_radial = 0.0;
    double E0 = 0.0;  // discrete atom, used for centring
    double rho = 0.0;
    double rho_error = 0.0;
    std::size_t unknowns = 0;
    Closure closure = Closure::Zigzag;
    std::vector<ContinuumState> states;
    int edge_count = 0;
    int edge_index = -1;          // edge-flagged state nearest E0, or -1
    double ansatz_overlap = 0.0;  // max |<psi, ansatz>| over edge-flagged states
    double ansatz_rq_gap = 0.0;   // (RQ - E0) of the ansatz, raw units
    double gram_max_offdiag = 0.0;
    double gram_max_diag_defect = 0.0;
    double max_orbital_residual = 0.0;
    cplx nn_element_ratio = 0.0;  // <p_B[0], H p_A[0]> / (-rho)
    double tb_distance = 0.0;
    double seconds = 0.0;

    std::vector<double> omegas() const;
};

/// Shared inputs for a lambda: radial ground state, rho and the discrete atom.
struct LambdaContext {
    double lambda = 0.0;
    GroundState gs;
    HoppingCoefficient rho;
    DiscreteAtom atom;
};

LambdaContext make_lambda_context(const ContinuumConfig& cfg, double lambda);

ContinuumRun run_continuum(const ContinuumConfig& cfg, const LambdaContext& ctx, double kpar);

}  // namespace zz
