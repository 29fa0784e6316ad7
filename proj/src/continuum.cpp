#include "zigzag/continuum.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "zigzag/error.hpp"
#include "zigzag/numerics.hpp"

namespace zz {

namespace {

const double kS3 = std::sqrt(3.0);

struct Bond {
    int di, dj;
    double phase;  // multiples of kpar / p
};

// a . d for the six triangular bonds with a = (kpar / 2pi) K2, a.v1 = 0, a.v2 = kpar.
constexpr Bond kBonds[6] = {{1, 0, 0.0},  {-1, 0, 0.0}, {0, 1, 1.0},
                            {0, -1, -1.0}, {1, -1, -1.0}, {-1, 1, 1.0}};

double stencil_weight(double h) { return 2.0 / (3.0 * h * h); }

double lens_area(double R, double rc, double d) {
    if (d >= R + rc) return 0.0;
    if (d <= std::abs(R - rc)) return kPi * std::min(R, rc) * std::min(R, rc);
    auto clampc = [](double x) { return std::clamp(x, -1.0, 1.0); };
    const double a1 = R * R * std::acos(clampc((d * d + R * R - rc * rc) / (2 * d * R)));
    const double a2 = rc * rc * std::acos(clampc((d * d + rc * rc - R * R) / (2 * d * rc)));
    const double a3 =
        0.5 * std::sqrt(std::max(0.0, (-d + R + rc) * (d + R - rc) * (d - R + rc) * (d + R + rc)));
    return a1 + a2 - a3;
}

Vec2 lattice_point(double i, double j, double h) {
    return Vec2(h * i * kS3 / 2.0, h * (0.5 * i + j));
}

}  // namespace

double CylinderGrid::node_area() const { return 0.5 * kS3 * h() * h(); }

std::size_t CylinderGrid::index(int i, int j) const {
    const int jw = ((j % p) + p) % p;
    return std::size_t(i - imin()) * p + jw;
}

Vec2 CylinderGrid::coord(std::size_t idx) const {
    return lattice_point(row_of(idx), col_of(idx), h());
}

CylinderGrid build_grid(int ncells, std::array<int, 2> ppc, int pad_left, int pad_right) {
    if (ncells < 2) throw Error(ErrorKind::Validation, "ncells must be >= 2");
    if (ppc[0] < 8 || ppc[1] < 8) throw Error(ErrorKind::Validation, "resolution must be >= 8");
    if (ppc[0] != ppc[1])
        throw Error(ErrorKind::Validation, "the triangular stencil needs equal resolution along v1, v2");
    if (pad_left < 0 || pad_right < 0) throw Error(ErrorKind::Validation, "pads must be >= 0");
    CylinderGrid g{ncells, ppc[0], pad_left, pad_right};
    if (g.size() > kMaxGridNodes) throw Error(ErrorKind::GridTooLarge, "grid exceeds node limit");
    return g;
}

double smoothed_well(const AtomicWell& well, double d, double h) {
    if (well.shape == WellShape::SmoothBump) return well.V(d);
    // Disc of the same area as one mesh cell.
    const double rc = h * std::sqrt(kS3 / (2.0 * kPi));
    return -lens_area(well.r0, rc, d) / (kPi * rc * rc);
}

double DiscreteAtom::at(int di, int dj) const {
    if (std::abs(di) > M || std::abs(dj) > M) return 0.0;
    return values[std::size_t(di + M) * (2 * M + 1) + (dj + M)];
}

DiscreteAtom discrete_atom(const AtomicWell& well, double lambda, int p, double radius) {
    DiscreteAtom a;
    a.p = p;
    a.M = int(std::ceil(radius * p));
    const int M = a.M, W = 2 * M + 1;
    const double h = 1.0 / p, c = stencil_weight(h), l2 = lambda * lambda;
    std::vector<int> id(std::size_t(W) * W, -1);
    std::vector<std::pair<int, int>> nodes;
    for (int i = -M; i <= M; ++i)
        for (int j = -M; j <= M; ++j)
            if (std::abs(i + j) <= M) {
                id[std::size_t(i + M) * W + (j + M)] = int(nodes.size());
                nodes.emplace_back(i, j);
            }
    const int n = int(nodes.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(std::size_t(n) * 7);
    Eigen::VectorXd V(n);
    for (int k = 0; k < n; ++k) {
        const auto [i, j] = nodes[k];
        V(k) = smoothed_well(well, lattice_point(i, j, h).norm(), h);
        trip.emplace_back(k, k, 6.0 * c + l2 * V(k));
        for (const Bond& b : kBonds) {
            const int ii = i + b.di, jj = j + b.dj;
            if (std::abs(ii) > M || std::abs(jj) > M || std::abs(ii + jj) > M) continue;
            trip.emplace_back(k, id[std::size_t(ii + M) * W + (jj + M)], -c);
        }
    }
    Eigen::SparseMatrix<double> H(n, n);
    H.setFromTriplets(trip.begin(), trip.end());

    const double Erad = ground_state(well, lambda).E0;
    const double sigma = Erad - 0.05 * std::abs(Erad) - 1.0;
    Eigen::SparseMatrix<double> S = H;
    for (int k = 0; k < n; ++k) S.coeffRef(k, k) -= sigma;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(S);
    if (ldlt.info() != Eigen::Success)
        throw Error(ErrorKind::NonConvergence, "atomic factorization failed");
    Eigen::VectorXd x(n);
    for (int k = 0; k < n; ++k) x(k) = std::exp(-lattice_point(nodes[k].first, nodes[k].second, h).squaredNorm());
    x.normalize();
    double E = 0.0, res = 1.0;
    for (int it = 0; it < 300; ++it) {
        x = ldlt.solve(x);
        x.normalize();
        const Eigen::VectorXd Hx = H * x;
        E = x.dot(Hx);
        res = (Hx - E * x).norm();
        if (res < 1e-10 * std::max(1.0, std::abs(E))) break;
    }
    if (res > 1e-6 * std::max(1.0, std::abs(E)))
        throw Error(ErrorKind::NonConvergence, "atomic inverse iteration did not converge");
    if (!(E < 0.0)) throw Error(ErrorKind::NoBoundState, "discrete atom has no bound state");
    if (x.sum() < 0) x = -x;
    const double area = 0.5 * kS3 * h * h;
    x /= std::sqrt(area);
    a.E0 = E;
    a.values.assign(std::size_t(W) * W, 0.0);
    for (int k = 0; k < n; ++k)
        a.values[std::size_t(nodes[k].first + M) * W + (nodes[k].second + M)] = x(k);
    return a;
}

CylinderProblem assemble_fiber(const CylinderGrid& grid, const AtomicWell& well, double lambda,
                               double kpar, Closure closure, const DiscreteAtom* atom,
                               bool include_sites) {
    CylinderProblem prob;
    prob.grid = grid;
    prob.well = well;
    prob.lambda = lambda;
    prob.kpar = kpar;
    const SpectralWindow win = spectral_window(kpar);
    prob.closure = resolve_closure(closure, win);
    prob.atom = (atom && atom->p == grid.p) ? *atom : discrete_atom(well, lambda, grid.p);

    const int p = grid.p;
    const double h = grid.h(), c = stencil_weight(h), l2 = lambda * lambda;
    if (include_sites)
        for (int n = 0; n < grid.ncells; ++n) {
            prob.sites.push_back({Sublattice::A, n, double(n * p), 0.0});
            if (!(prob.closure == Closure::Bearded && n == grid.ncells - 1))
                prob.sites.push_back({Sublattice::B, n, n * p + p / 3.0, p / 3.0});
        }

    // V_sharp: each disc is added at its unwrapped position, which sums all v2-images.
    std::vector<double> V(grid.size(), 0.0);
    const int box = int(std::ceil((well.r0 + h) * p * 2.0 / kS3)) + 2;
    for (const SiteRef& s : prob.sites) {
        const Vec2 centre = lattice_point(s.i, s.j, h);
        const int i0 = int(std::floor(s.i)), j0 = int(std::floor(s.j));
        for (int i = std::max(grid.imin(), i0 - box); i <= std::min(grid.imax(), i0 + box); ++i)
            for (int j = j0 - box; j <= j0 + box; ++j) {
                const double v = smoothed_well(well, (lattice_point(i, j, h) - centre).norm(), h);
                if (v != 0.0) V[grid.index(i, j)] += v;
            }
    }

    const std::size_t n = grid.size();
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(n * 7);
    cplx ph[6];
    for (int b = 0; b < 6; ++b) ph[b] = -c * std::polar(1.0, kBonds[b].phase * kpar / p);
    for (std::size_t k = 0; k < n; ++k) {
        const int i = grid.row_of(k), j = grid.col_of(k);
        trip.emplace_back(int(k), int(k), 6.0 * c + l2 * V[k] - prob.atom.E0);
        for (int b = 0; b < 6; ++b) {
            const int ii = i + kBonds[b].di;
            if (ii < grid.imin() || ii > grid.imax()) continue;
            trip.emplace_back(int(k), int(grid.index(ii, j + kBonds[b].dj)), ph[b]);
        }
    }
    prob.H.resize(int(n), int(n));
    prob.H.setFromTriplets(trip.begin(), trip.end());
    prob.H.makeCompressed();
    return prob;
}

OrbitalBasis orbital_basis(const CylinderProblem& prob) {
    const CylinderGrid& g = prob.grid;
    const int p = g.p;
    if (p % 3 != 0)
        throw Error(ErrorKind::Validation, "orbital basis needs sites on nodes (resolution % 3 == 0)");
    const int M = prob.atom.M;
    const int ns = prob.tb_dim();
    OrbitalBasis ob;
    ob.sites = prob.sites;
    ob.vectors = Eigen::MatrixXcd::Zero(Eigen::Index(g.size()), ns);
    cplx img[2 * kOrbitalImages + 1];
    for (int m2 = -kOrbitalImages; m2 <= kOrbitalImages; ++m2)
        img[m2 + kOrbitalImages] = std::polar(1.0, prob.kpar * m2);
    for (int s = 0; s < ns; ++s) {
        const int ci = int(std::lround(prob.sites[s].i)), cj = int(std::lround(prob.sites[s].j));
        for (int i = std::max(g.imin(), ci - M); i <= std::min(g.imax(), ci + M); ++i)
            for (int j = 0; j < p; ++j) {
                cplx acc = 0.0;
                for (int m2 = -kOrbitalImages; m2 <= kOrbitalImages; ++m2) {
                    const double v = prob.atom.at(i - ci, j - cj - m2 * p);
                    if (v != 0.0) acc += img[m2 + kOrbitalImages] * v;
                }
                if (acc != cplx(0.0))
                    ob.vectors(Eigen::Index(g.index(i, j)), s) = std::polar(1.0, -prob.kpar * j / p) * acc;
            }
    }
    const double A = g.node_area();
    const Eigen::MatrixXcd HU = prob.H * ob.vectors;
    ob.gram = A * ob.vectors.adjoint() * ob.vectors;
    ob.energy = A * ob.vectors.adjoint() * HU;
    for (int a = 0; a < ns; ++a) {
        ob.max_diag_defect = std::max(ob.max_diag_defect, std::abs(ob.gram(a, a) - 1.0));
        ob.max_residual = std::max(ob.max_residual, HU.col(a).norm() / ob.vectors.col(a).norm());
        for (int b = 0; b < ns; ++b)
            if (a != b) ob.max_offdiag = std::max(ob.max_offdiag, std::abs(ob.gram(a, b)));
    }
    return ob;
}

SparseEigs shift_invert_eigs(const SparseC& H, double sigma, int nev, double tol, int maxit) {
    const Eigen::Index n = H.rows();
    if (nev < 1 || nev > n) throw Error(ErrorKind::Validation, "nev out of range");
    double scale = 1.0;
    {
        Eigen::VectorXd rs = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < H.outerSize(); ++k)
            for (SparseC::InnerIterator it(H, k); it; ++it) rs(it.row()) += std::abs(it.value());
        scale = std::max(1.0, rs.maxCoeff());
    }
    SparseEigs out;
    auto pick = [&](const Eigen::VectorXd& th, const Eigen::MatrixXcd& X, const Eigen::VectorXd& res) {
        std::vector<int> ord(th.size());
        std::iota(ord.begin(), ord.end(), 0);
        std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
            return std::abs(th(a) - sigma) < std::abs(th(b) - sigma);
        });
        ord.resize(nev);
        std::sort(ord.begin(), ord.end(), [&](int a, int b) { return th(a) < th(b); });
        out.values.resize(nev);
        out.vectors.resize(n, nev);
        out.residuals.resize(nev);
        for (int k = 0; k < nev; ++k) {
            out.values(k) = th(ord[k]);
            out.vectors.col(k) = X.col(ord[k]);
            out.residuals(k) = res(ord[k]);
        }
    };

    if (std::size_t(n) < kDenseFallback) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(H)};
        if (es.info() != Eigen::Success)
            throw Error(ErrorKind::NonConvergence, "dense fallback eigensolver failed");
        const Eigen::MatrixXcd R = H * es.eigenvectors() - es.eigenvectors() * es.eigenvalues().asDiagonal();
        pick(es.eigenvalues(), es.eigenvectors(), R.colwise().norm().transpose());
        return out;
    }

    SparseC A = H;
    {
        SparseC I(n, n);
        I.setIdentity();
        A -= sigma * I;
    }
    Eigen::SparseLU<SparseC, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw Error(ErrorKind::NonConvergence, "sparse LU factorization failed");

    const int b = std::min<Eigen::Index>(n, nev + std::max(6, nev / 2));
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd X(n, b);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int k = 0; k < b; ++k) X(i, k) = cplx(nd(rng), nd(rng));
    Eigen::VectorXd th, res;
    for (int it = 1; it <= maxit; ++it) {
        const Eigen::MatrixXcd Y = lu.solve(X);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Y);
        const Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, b);
        const Eigen::MatrixXcd HQ = H * Q;
        Eigen::MatrixXcd T = Q.adjoint() * HQ;
        T = 0.5 * (T + T.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T);
        th = es.eigenvalues();
        X = Q * es.eigenvectors();
        res = (HQ * es.eigenvectors() - X * th.asDiagonal()).colwise().norm().transpose();
        pick(th, X, res);
        out.iterations = it;
        if (out.residuals.maxCoeff() <= tol * scale) return out;
    }
    throw Error(ErrorKind::NonConvergence,
                "shift-invert iteration stalled; achieved residual " +
                    std::to_string(out.residuals.maxCoeff() / scale));
}

double continuum_left_mass(const CylinderGrid& g, const Eigen::VectorXcd& v) {
    const int q = (g.ncells + 3) / 4;
    double left = 0.0, tot = 0.0;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double m = std::norm(v(k));
        tot += m;
        // Boundary halfway between B_{q-1} (row q - 2/3) and A_q (row q), in cell units.
        if (3 * g.row_of(std::size_t(k)) < (3 * q - 1) * g.p) left += m;
    }
    return tot > 0 ? left / tot : 0.0;
}

std::vector<ContinuumState> edge_eigensolve(const CylinderProblem& prob, double rho, int nev) {
    if (nev < 1) throw Error(ErrorKind::Validation, "nev must be >= 1");
    const SparseEigs eg = shift_invert_eigs(prob.H, 0.0, nev);
    std::vector<ContinuumState> out;
    for (int k = 0; k < nev; ++k) {
        ContinuumState s;
        s.energy = {eg.values(k) + prob.atom.E0, prob.atom.E0, rho, eg.values(k) / rho};
        s.vector = eg.vectors.col(k);
        s.left_mass = continuum_left_mass(prob.grid, s.vector);
        s.edge = s.left_mass >= kEdgeMassThreshold;
        s.residual = eg.residuals(k);
        out.push_back(std::move(s));
    }
    return out;
}

Eigen::VectorXcd tb_ansatz(const CylinderProblem& prob, const OrbitalBasis& basis) {
    const cplx zeta = spectral_window(prob.kpar).zeta;
    Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(basis.vectors.rows());
    for (int s = 0; s < int(basis.sites.size()); ++s)
        if (basis.sites[s].sub == Sublattice::A)
            phi += std::pow(-zeta, basis.sites[s].n) * basis.vectors.col(s);
    return phi / phi.norm();
}

double scaled_spectrum_distance(const std::vector<double>& omegas, const Eigen::VectorXd& tb) {
    return hausdorff(omegas, std::vector<double>(tb.data(), tb.data() + tb.size()));
}

}  // namespace zz

namespace zz {

std::vector<double> ContinuumRun::omegas() const {
    std::vector<double> o;
    for (const auto& s : states) o.push_back(s.energy.omega_tilde);
    return o;
}

LambdaContext make_lambda_context(const ContinuumConfig& cfg, double lambda) {
    LambdaContext c;
    c.lambda = lambda;
    c.gs = ground_state(cfg.well, lambda);
    c.rho = hopping_rho(c.gs, cfg.well);
    c.atom = discrete_atom(cfg.well, lambda, cfg.resolution);
    return c;
}

ContinuumRun run_continuum(const ContinuumConfig& cfg, const LambdaContext& ctx, double kpar) {
    const auto t0 = std::chrono::steady_clock::now();
    const CylinderGrid grid = build_grid(cfg.ncells, {cfg.resolution, cfg.resolution}, cfg.pad_left,
                                         cfg.pad_right);
    const CylinderProblem prob =
        assemble_fiber(grid, cfg.well, ctx.lambda, kpar, cfg.closure, &ctx.atom);
    ContinuumRun r;
    r.lambda = ctx.lambda;
    r.kpar = kpar;
    r.E0_radial = ctx.gs.E0;
    r.E0 = prob.atom.E0;
    r.rho = ctx.rho.rho;
    r.rho_error = ctx.rho.quadrature_error_estimate;
    r.unknowns = grid.size();
    r.closure = prob.closure;
    const int nev = cfg.nev > 0 ? cfg.nev : prob.tb_dim();
    r.states = edge_eigensolve(prob, r.rho, nev);

    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < int(r.states.size()); ++k)
        if (r.states[k].edge) {
            ++r.edge_count;
            if (std::abs(r.states[k].energy.omega_tilde) < best) {
                best = std::abs(r.states[k].energy.omega_tilde);
                r.edge_index = k;
            }
        }

    const OrbitalBasis ob = orbital_basis(prob);
    r.gram_max_offdiag = ob.max_offdiag;
    r.gram_max_diag_defect = ob.max_diag_defect;
    r.max_orbital_residual = ob.max_residual;
    if (ob.sites.size() >= 2) r.nn_element_ratio = ob.energy(1, 0) / (-r.rho);
    const Eigen::VectorXcd phi = tb_ansatz(prob, ob);
    r.ansatz_rq_gap = std::real(phi.dot(prob.H * phi));
    for (const auto& s : r.states)
        if (s.edge) r.ansatz_overlap = std::max(r.ansatz_overlap, std::abs(s.vector.dot(phi)));

    const Spectrum tb = spectrum(build_fiber(spectral_window(kpar), cfg.ncells, cfg.closure));
    r.tb_distance = scaled_spectrum_distance(r.omegas(), tb.values);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace zz
