#include "forge/energy_search.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "forge/errors.hpp"

namespace forge {

namespace {

// Stable spectral data of the pencil (K, M) restricted to the zero-mean
// subspace. The raw Gram M of heavily overlapping atoms is ill-conditioned;
// whitening through its eigendecomposition (with truncation of numerically
// dead directions) keeps the generalized eigenproblem backward stable.
struct ZeroMeanPencil {
    Eigen::MatrixXd basis; // n x r, M-orthonormal columns, b^T basis = 0
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors; // r x r

    Eigen::VectorXd coefficients(int k) const { return basis * vectors.col(k); }
};

ZeroMeanPencil solve_zero_mean_pencil(const BumpDictionary& dict) {
    const Eigen::MatrixXd& M = dict.M();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(M);
    if (em.info() != Eigen::Success)
        throw SolverError("dictionary mass eigendecomposition failed");
    const double mmax = em.eigenvalues().maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < em.eigenvalues().size(); ++i)
        if (em.eigenvalues()[i] > 1e-12 * mmax) keep.push_back(i);
    Eigen::MatrixXd W(M.rows(), keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
        W.col(i) = em.eigenvectors().col(keep[i]) /
                   std::sqrt(em.eigenvalues()[keep[i]]);

    // zero-mean constraint inside the whitened coordinates
    const Eigen::VectorXd bw = W.transpose() * dict.b();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(bw);
    const Eigen::MatrixXd Q =
        qr.householderQ() * Eigen::MatrixXd::Identity(bw.size(), bw.size());
    const Eigen::MatrixXd Z = Q.rightCols(bw.size() - 1);

    ZeroMeanPencil out;
    out.basis = W * Z;
    const Eigen::MatrixXd H = out.basis.transpose() * dict.K() * out.basis;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
    if (es.info() != Eigen::Success)
        throw SolverError("zero-mean pencil eigensolver failed");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
    return out;
}

} // namespace

EnergySearcher::EnergySearcher(const BumpDictionary& dict,
                               const SpectrumReport& spectrum, const Mesh& mesh)
    : dict_(dict), spectrum_(spectrum), mesh_(mesh) {
    fits_.resize(spectrum.count());
}

const InfimumResult& EnergySearcher::infimum() const {
    if (!infimum_) infimum_ = constrained_infimum(dict_);
    return *infimum_;
}

const EnergySearcher::Fit& EnergySearcher::eigen_fit(int k) const {
    if (fits_[k]) return *fits_[k];
    const ScalarField u = spectrum_.eigenfunction(mesh_, k);
    const int n = dict_.size();
    Eigen::VectorXd g(n);
    // projection-grade quadrature: the fit residual is recorded, not relied on
    double unorm2 = 0.0;
    {
        const CubeQuadrature quad(dict_.support_box(), 20, 4);
        for (std::size_t p = 0; p < quad.points().size(); ++p) {
            const double uv = u.eval(quad.points()[p]);
            unorm2 += quad.weights()[p] * uv * uv;
        }
    }
    for (int i = 0; i < n; ++i) {
        const Vec3& c = dict_.centers()[i];
        const Box bx{c - Vec3::Constant(dict_.rho()),
                     c + Vec3::Constant(dict_.rho())};
        const CubeQuadrature quad(bx, 4, 5);
        double acc = 0.0;
        for (std::size_t p = 0; p < quad.points().size(); ++p) {
            const double phi = bump_eval(quad.points()[p], c, dict_.rho()).value;
            if (phi == 0.0) continue;
            acc += quad.weights()[p] * phi * u.eval(quad.points()[p]);
        }
        g[i] = acc;
    }
    Fit fit;
    fit.coef = dict_.M().ldlt().solve(g);
    const double misfit2 = std::max(
        0.0, unorm2 - 2.0 * fit.coef.dot(g) + fit.coef.dot(dict_.M() * fit.coef));
    fit.relative_residual = unorm2 > 0 ? std::sqrt(misfit2 / unorm2) : 0.0;
    fits_[k] = std::move(fit);
    return *fits_[k];
}

void EnergySearcher::ensure_pencil() const {
    if (pencil_values_) return;
    const ZeroMeanPencil p = solve_zero_mean_pencil(dict_);
    pencil_basis_ = p.basis;
    pencil_values_ = p.values;
    pencil_vectors_ = p.vectors;
}

SweepResult EnergySearcher::sweep(double tau) const {
    SweepResult best;
    best.v.dict = &dict_;
    best.energy = -1.0;

    const Fit& fit1 = eigen_fit(0);
    const double b_dot_1 = dict_.b().dot(fit1.coef);

    for (int k = 1; k < spectrum_.count(); ++k) {
        const Fit& fitk = eigen_fit(k);
        BumpExpansion vk{&dict_, fitk.coef};
        if (std::abs(b_dot_1) > 1e-14) {
            const double alpha_k = dict_.b().dot(fitk.coef) / b_dot_1;
            vk.coef = (fitk.coef - alpha_k * fit1.coef) /
                      std::sqrt(1.0 + alpha_k * alpha_k);
        }
        if (vk.coef.dot(dict_.M() * vk.coef) <= 1e-14) continue;
        vk.project_to_constraints();
        const double e = vk.energy();
        if (e > best.energy) {
            best.v = vk;
            best.energy = e;
            best.modes_used = k + 1;
            best.fit_residual = fitk.relative_residual;
        }
        if (best.energy >= tau) return best;
    }

    // Beyond the FEM window: continue with the high modes of the Galerkin
    // pencil on the dictionary space itself, same v_k combination.
    ensure_pencil();
    const Eigen::VectorXd& evals = *pencil_values_;
    for (int k = 0; k < evals.size(); ++k) {
        if (evals[k] < tau && k + 1 < evals.size()) continue;
        BumpExpansion vk{&dict_, (*pencil_basis_) * pencil_vectors_->col(k)};
        vk.project_to_constraints();
        const double e = vk.energy();
        if (e > best.energy) {
            best.v = vk;
            best.energy = e;
            best.modes_used = spectrum_.count() + k + 1;
        }
        break;
    }

    if (best.energy < tau)
        throw ConstructionError(
            "upper_sweep: the dictionary cannot reach the requested energy " +
            std::to_string(tau) + " (max " + std::to_string(best.energy) +
            "); enrich the dictionary");
    return best;
}

BumpExpansion EnergySearcher::find(double tau, double rel_tol) const {
    const InfimumResult& inf = infimum();
    if (tau < inf.m * (1.0 - 1e-12))
        throw ConstructionError(
            "find_energy_function: tau below the constrained infimum m");
    if (std::abs(tau - inf.m) <= rel_tol * tau) return inf.minimizer;
    const SweepResult s = sweep(tau);
    return path_bisection(inf.minimizer, s.v, tau, rel_tol);
}

InfimumResult constrained_infimum(const BumpDictionary& dict) {
    const int n = dict.size();
    if (n < 2)
        throw InvalidInputError(
            "constrained_infimum: zero-mean subspace is empty; the dictionary "
            "needs at least two bumps");
    const ZeroMeanPencil p = solve_zero_mean_pencil(dict);

    InfimumResult out;
    out.m = p.values[0];
    out.minimizer.dict = &dict;
    out.minimizer.coef = p.coefficients(0);
    out.minimizer.project_to_constraints();

    // residual of the constrained stationarity condition
    const Eigen::VectorXd& a = out.minimizer.coef;
    Eigen::VectorXd grad = 2.0 * (dict.K() * a - out.m * (dict.M() * a));
    const Eigen::VectorXd nb = dict.b().normalized();
    grad -= nb.dot(grad) * nb;
    Eigen::VectorXd nm = dict.M() * a;
    nm -= nb.dot(nm) * nb;
    if (nm.norm() > 0) grad -= (nm.dot(grad) / nm.squaredNorm()) * nm;
    out.stationarity = grad.norm() / std::max(1.0, std::abs(out.m));
    return out;
}

SweepResult upper_sweep(const BumpDictionary& dict,
                        const SpectrumReport& spectrum, const Mesh& mesh,
                        double tau) {
    return EnergySearcher(dict, spectrum, mesh).sweep(tau);
}

BumpExpansion find_energy_function(const BumpDictionary& dict,
                                   const SpectrumReport& spectrum,
                                   const Mesh& mesh, double tau,
                                   double rel_tol) {
    return EnergySearcher(dict, spectrum, mesh).find(tau, rel_tol);
}

BumpExpansion path_bisection(const BumpExpansion& lo_energy_end,
                             const BumpExpansion& hi_energy_end, double tau,
                             double rel_tol) {
    const BumpDictionary& dict = *lo_energy_end.dict;
    auto member = [&](double t) {
        BumpExpansion w{&dict, t * lo_energy_end.coef +
                                   (1.0 - t) * hi_energy_end.coef};
        w.project_to_constraints();
        return w;
    };
    // t = 1 is the low-energy end, t = 0 the high-energy end
    double t_hi = 1.0, t_lo = 0.0;
    BumpExpansion w = member(1.0);
    if (std::abs(w.energy() - tau) <= rel_tol * tau) return w;
    if (w.energy() > tau)
        throw ConstructionError("path_bisection: target below both endpoints");
    if (member(0.0).energy() < tau)
        throw ConstructionError("path_bisection: target above both endpoints");
    for (int it = 0; it < 200; ++it) {
        const double tm = 0.5 * (t_lo + t_hi);
        w = member(tm);
        const double e = w.energy();
        if (std::abs(e - tau) <= rel_tol * tau) return w;
        (e >= tau ? t_lo : t_hi) = tm;
    }
    throw ConstructionError("path_bisection: bracketing failed");
}

BumpExpansion quasi_interpolant(
    const BumpDictionary& dict,
    const std::function<double(const Vec3&)>& profile) {
    const int n = dict.size();
    BumpExpansion u{&dict, Eigen::VectorXd(n)};
    for (int j = 0; j < n; ++j)
        u.coef[j] = profile(dict.centers()[j]) * dict.mean_direction()[j];
    u.project_to_constraints();
    return u;
}

BumpExpansion smooth_member(const BumpDictionary& dict, int level) {
    const Box& sb = dict.support_box();
    auto y = [&](const Vec3& x) {
        return (x - sb.lo).cwiseQuotient(sb.extent()).eval();
    };
    switch (level) {
        case 0:
            return quasi_interpolant(dict, [&](const Vec3& x) {
                return std::tanh(5.0 * (0.5 - y(x)[2]));
            });
        case 1:
            return quasi_interpolant(dict, [&](const Vec3& x) {
                return std::sin(2.0 * M_PI * y(x)[2]);
            });
        case 2:
            return quasi_interpolant(dict, [&](const Vec3& x) {
                const Vec3 z = y(x);
                return std::sin(2.0 * M_PI * z[1]) * std::sin(2.0 * M_PI * z[2]);
            });
        case 3:
            return quasi_interpolant(dict, [&](const Vec3& x) {
                const Vec3 z = y(x);
                return std::sin(2.0 * M_PI * z[0]) * std::sin(2.0 * M_PI * z[1]) *
                       std::sin(2.0 * M_PI * z[2]);
            });
        default:
            return quasi_interpolant(dict, [&](const Vec3& x) {
                const Vec3 z = y(x);
                return std::sin((level - 1) * M_PI * z[2]) *
                       std::sin(2.0 * M_PI * z[1]);
            });
    }
}

BumpExpansion find_energy_function_smooth(const EnergySearcher& searcher,
                                          double tau, double rel_tol) {
    const BumpDictionary& dict = searcher.dictionary();
    const InfimumResult& inf = searcher.infimum();
    if (tau < inf.m * (1.0 - 1e-12))
        throw ConstructionError("find_energy_function: tau below m");

    std::optional<BumpExpansion> lo, hi;
    double e_lo = -1.0, e_hi = std::numeric_limits<double>::max();
    for (int level = 0; level <= 7; ++level) {
        BumpExpansion cand = smooth_member(dict, level);
        const double e = cand.energy();
        if (e <= tau && e > e_lo) {
            lo = cand;
            e_lo = e;
        }
        if (e > tau && e < e_hi) {
            hi = cand;
            e_hi = e;
        }
    }
    if (!lo) {
        lo = inf.minimizer;
        e_lo = inf.m;
    }
    if (std::abs(e_lo - tau) <= rel_tol * tau) return *lo;
    if (!hi) {
        const SweepResult s = searcher.sweep(tau);
        hi = s.v;
    }
    return path_bisection(*lo, *hi, tau, rel_tol);
}

AlphaChoice choose_alpha(double lambda0, double m, int n) {
    if (lambda0 == 0.0)
        throw InvalidInputError("choose_alpha: lambda0 must be nonzero");
    if (m <= 0.0) throw InvalidInputError("choose_alpha: m must be positive");
    const double excluded = 0.5 - 1.0 / n;
    auto admissible = [&](double a) {
        return lambda0 > 0 ? a * m / (2.0 * a + 1.0) < lambda0
                           : a * m / (2.0 * a + 1.0) > lambda0;
    };
    double alpha = 0.0;
    bool found = false;
    for (int j = 0; j < 60; ++j) {
        double a = lambda0 > 0 ? std::ldexp(1.0, -j)         // 1, 1/2, 1/4, ...
                               : -std::ldexp(1.0, -(j + 2)); // -1/4, -1/8, ...
        if (std::abs(a - excluded) <= 1e-9) a *= 255.0 / 256.0;
        if (admissible(a)) {
            alpha = a;
            found = true;
            break;
        }
    }
    if (!found)
        throw ConstructionError("choose_alpha: no admissible exponent found");
    AlphaChoice out;
    out.alpha = alpha;
    out.tau = (2.0 * alpha + 1.0) * lambda0 / alpha;
    if (!(out.tau > m))
        throw ConstructionError("choose_alpha: tau did not exceed m");
    return out;
}

} // namespace forge
