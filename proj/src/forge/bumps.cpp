#include "forge/bumps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <thread>

#include "forge/errors.hpp"

namespace forge {

BumpEval bump_eval(const Vec3& x, const Vec3& center, double rho) {
    BumpEval out;
    const Vec3 dx = x - center;
    const double t = dx.squaredNorm() / (rho * rho);
    if (t >= 1.0) return out;
    const double om = 1.0 - t;
    if (1.0 / om > 700.0) return out; // exp underflows to exact zero
    const double psi = std::exp(-1.0 / om);
    const double g1 = -1.0 / (om * om);      // d/dt of -1/(1-t)
    const double g2 = -2.0 / (om * om * om); // second derivative
    const Vec3 st = 2.0 / (rho * rho) * dx;  // grad t
    const double mu = 2.0 / (rho * rho);     // hess t = mu I
    out.value = psi;
    out.grad = psi * g1 * st;
    out.hess = psi * ((g1 * g1 + g2) * (st * st.transpose()) +
                      g1 * mu * Mat3::Identity());
    return out;
}

ThirdTensor bump_third(const Vec3& x, const Vec3& center, double rho) {
    ThirdTensor out = zero_third();
    const Vec3 dx = x - center;
    const double t = dx.squaredNorm() / (rho * rho);
    if (t >= 1.0) return out;
    const double om = 1.0 - t;
    if (1.0 / om > 700.0) return out;
    const double psi = std::exp(-1.0 / om);
    const double g1 = -1.0 / (om * om);
    const double g2 = -2.0 / (om * om * om);
    const double g3 = -6.0 / (om * om * om * om);
    const Vec3 s = 2.0 / (rho * rho) * dx;
    const double mu = 2.0 / (rho * rho);
    // third derivative of exp(g(t(x))): psi (g1^3 + 3 g1 g2 + g3) dt^3 plus
    // the hess-t cross terms; d3t = 0
    const double c3 = psi * (g1 * g1 * g1 + 3.0 * g1 * g2 + g3);
    const double c2 = psi * (g1 * g1 + g2);
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double v = c3 * s[k] * s[i] * s[j];
                v += c2 * mu *
                     ((i == j ? s[k] : 0.0) + (i == k ? s[j] : 0.0) +
                      (j == k ? s[i] : 0.0));
                out[k](i, j) = v;
            }
    return out;
}

namespace {

struct PairIntegrals {
    double k = 0.0;
    double m = 0.0;
};

// integral over the intersection of the two support cubes
PairIntegrals pair_integrals(const Vec3& ci, const Vec3& cj, double rho,
                             const ConductivityField& gamma,
                             const DictionaryOptions& opts) {
    Box bx;
    for (int ax = 0; ax < 3; ++ax) {
        bx.lo[ax] = std::max(ci[ax], cj[ax]) - rho;
        bx.hi[ax] = std::min(ci[ax], cj[ax]) + rho;
    }
    PairIntegrals out;
    if (bx.degenerate(0.0)) return out;
    std::array<int, 3> panels;
    for (int ax = 0; ax < 3; ++ax)
        panels[ax] = std::max(
            1, static_cast<int>(std::ceil((bx.hi[ax] - bx.lo[ax]) *
                                          opts.panels_per_radius / rho)));
    const CubeQuadrature quad(bx, panels, opts.quad_points);
    const auto& pts = quad.points();
    const auto& wts = quad.weights();
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const BumpEval a = bump_eval(pts[p], ci, rho);
        if (a.value == 0.0) continue;
        const BumpEval b = bump_eval(pts[p], cj, rho);
        if (b.value == 0.0) continue;
        out.m += wts[p] * a.value * b.value;
        out.k += wts[p] * a.grad.dot(gamma.eval(pts[p]) * b.grad);
    }
    return out;
}

double single_moment(double rho, int qpts) {
    // b = 4 pi int_0^rho psi(r) r^2 dr
    const GaussLegendre gl(qpts);
    const int panels = 40;
    const double dp = rho / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = p * dp;
        for (int q = 0; q < qpts; ++q) {
            const double r = a + 0.5 * dp * (gl.nodes[q] + 1.0);
            const double t = r * r / (rho * rho);
            if (t >= 1.0) continue;
            const double om = 1.0 - t;
            if (1.0 / om > 700.0) continue;
            acc += 0.5 * dp * gl.weights[q] * 4.0 * M_PI * r * r *
                   std::exp(-1.0 / om);
        }
    }
    return acc;
}

bool spatially_constant(const ConductivityField& g) {
    if (dynamic_cast<const IdentityConductivity*>(&g)) return true;
    if (auto s = dynamic_cast<const ScaledConductivity*>(&g))
        return spatially_constant(*s->base());
    return false;
}

// Two-center integrals of radial bumps reduce to 2D in bipolar coordinates:
// dx = (2 pi / D) r1 r2 dr1 dr2 over { |r1 - r2| < D < r1 + r2 }.
struct BipolarIntegrals {
    double k = 0.0;
    double m = 0.0;
};

double bump_radial(double r, double rho, int deriv) {
    const double t = r * r / (rho * rho);
    if (t >= 1.0) return 0.0;
    const double om = 1.0 - t;
    if (1.0 / om > 700.0) return 0.0;
    const double psi = std::exp(-1.0 / om);
    if (deriv == 0) return psi;
    return psi * (-1.0 / (om * om)) * (2.0 * r / (rho * rho)); // d psi / dr
}

BipolarIntegrals bipolar_pair(double dist, double rho, int panels, int qpts) {
    BipolarIntegrals out;
    const GaussLegendre gl(qpts);
    std::vector<double> nodes, wts;
    nodes.reserve(panels * qpts);
    wts.reserve(panels * qpts);
    const double dp = rho / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = p * dp;
        for (int q = 0; q < qpts; ++q) {
            nodes.push_back(a + 0.5 * dp * (gl.nodes[q] + 1.0));
            wts.push_back(0.5 * dp * gl.weights[q]);
        }
    }
    if (dist < 1e-14) {
        // coincident centers: plain radial integrals
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double r = nodes[i];
            const double w = 4.0 * M_PI * wts[i] * r * r;
            const double v = bump_radial(r, rho, 0);
            const double dv = bump_radial(r, rho, 1);
            out.m += w * v * v;
            out.k += w * dv * dv;
        }
        return out;
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double r1 = nodes[i];
        const double v1 = bump_radial(r1, rho, 0);
        const double d1 = bump_radial(r1, rho, 1);
        if (v1 == 0.0 && d1 == 0.0) continue;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const double r2 = nodes[j];
            if (r1 + r2 <= dist || std::abs(r1 - r2) >= dist) continue;
            const double v2 = bump_radial(r2, rho, 0);
            const double d2 = bump_radial(r2, rho, 1);
            if (v2 == 0.0 && d2 == 0.0) continue;
            const double jac = 2.0 * M_PI / dist * r1 * r2 * wts[i] * wts[j];
            out.m += jac * v1 * v2;
            // grad phi1 . grad phi2 = psi'(r1) psi'(r2) (r1^2+r2^2-D^2)/(2 r1 r2)
            out.k += jac * d1 * d2 * (r1 * r1 + r2 * r2 - dist * dist) /
                     (2.0 * r1 * r2);
        }
    }
    return out;
}

int thread_count(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || n < 4) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < std::min(threads, n); ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                body(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace

BumpDictionary BumpDictionary::build(const Box& domain, double collar_width,
                                     const ConductivityField& gamma,
                                     const DictionaryOptions& opts) {
    if (collar_width < 0.0)
        throw InvalidInputError("dictionary: negative collar width");
    const int n = opts.centers_per_axis;
    if (n < 1) throw InvalidInputError("dictionary: need at least one center");

    BumpDictionary dict;
    dict.domain_ = domain;
    dict.collar_ = collar_width;
    dict.inner_ = domain.shrunk(collar_width);
    dict.opts_ = opts;
    if (dict.inner_.degenerate())
        throw InvalidInputError("dictionary: collar exhausts the domain");

    const Vec3 inner_len = dict.inner_.extent();
    const double d_iso =
        inner_len.minCoeff() / (n - 1 + 2.0 * opts.radius_factor);
    dict.rho_ = opts.radius_factor * d_iso;
    for (int ax = 0; ax < 3; ++ax) {
        dict.spacing_[ax] =
            n > 1 ? (inner_len[ax] - 2.0 * dict.rho_) / (n - 1) : 1.0;
        dict.grid_origin_[ax] =
            n > 1 ? dict.inner_.lo[ax] + dict.rho_
                  : 0.5 * (dict.inner_.lo[ax] + dict.inner_.hi[ax]);
        dict.grid_n_[ax] = n;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                dict.centers_.emplace_back(
                    dict.grid_origin_[0] + i * dict.spacing_[0],
                    dict.grid_origin_[1] + j * dict.spacing_[1],
                    dict.grid_origin_[2] + k * dict.spacing_[2]);

    dict.support_ = Box{dict.centers_.front() - Vec3::Constant(dict.rho_),
                        dict.centers_.back() + Vec3::Constant(dict.rho_)};

    const int N = dict.size();
    dict.K_.setZero(N, N);
    dict.M_.setZero(N, N);
    dict.b_.setConstant(N, single_moment(dict.rho_, opts.quad_points));

    const int threads = thread_count(opts.threads);
    if (spatially_constant(gamma)) {
        // constant-coefficient fast path: radial atoms make pair integrals
        // functions of the center distance alone, computed in bipolar
        // coordinates as 2D integrals
        const double scale = gamma.eval(dict.centers_[0])(0, 0);
        std::map<long long, BipolarIntegrals> cache;
        for (int i = 0; i < N; ++i)
            for (int j = i; j < N; ++j) {
                const double dist = (dict.centers_[j] - dict.centers_[i]).norm();
                if (dist >= 2.0 * dict.rho_) continue;
                const long long key = llround(dist * 1e12);
                auto it = cache.find(key);
                if (it == cache.end())
                    it = cache
                             .emplace(key, bipolar_pair(dist, dict.rho_, 40,
                                                        opts.quad_points))
                             .first;
                dict.K_(i, j) = dict.K_(j, i) = scale * it->second.k;
                dict.M_(i, j) = dict.M_(j, i) = it->second.m;
            }
    } else {
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < N; ++i)
            for (int j = i; j < N; ++j)
                if ((dict.centers_[j] - dict.centers_[i]).norm() <
                    2.0 * dict.rho_)
                    pairs.emplace_back(i, j);
        std::vector<PairIntegrals> vals(pairs.size());
        parallel_for(static_cast<int>(pairs.size()), threads, [&](int p) {
            vals[p] = pair_integrals(dict.centers_[pairs[p].first],
                                     dict.centers_[pairs[p].second], dict.rho_,
                                     gamma, opts);
        });
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const auto [i, j] = pairs[p];
            dict.K_(i, j) = dict.K_(j, i) = vals[p].k;
            dict.M_(i, j) = dict.M_(j, i) = vals[p].m;
        }
    }

    // smooth mean-removal direction: envelope-compensated plateau whose
    // coefficients decay near the support edge instead of being boosted
    // (edge boosting plants single-atom Hessian spikes at the corners)
    {
        BumpExpansion ones{&dict, Eigen::VectorXd::Ones(N)};
        Eigen::VectorXd env(N);
        for (int j = 0; j < N; ++j) env[j] = ones.value(dict.centers_[j]);
        const double s0 = 0.5 * env.maxCoeff();
        dict.mean_dir_.resize(N);
        for (int j = 0; j < N; ++j)
            dict.mean_dir_[j] = env[j] / (env[j] * env[j] + s0 * s0);
        dict.mean_dir_ /= dict.b_.dot(dict.mean_dir_);
    }
    return dict;
}

void BumpDictionary::active_centers(const Vec3& x, std::vector<int>& out) const {
    out.clear();
    int lo[3], hi[3];
    for (int ax = 0; ax < 3; ++ax) {
        if (grid_n_[ax] == 1) {
            lo[ax] = 0;
            hi[ax] = 0;
            continue;
        }
        const double s = spacing_[ax];
        lo[ax] = std::max(
            0, static_cast<int>(
                   std::ceil((x[ax] - rho_ - grid_origin_[ax]) / s - 1e-12)));
        hi[ax] = std::min(
            grid_n_[ax] - 1,
            static_cast<int>(
                std::floor((x[ax] + rho_ - grid_origin_[ax]) / s + 1e-12)));
    }
    const double r2 = rho_ * rho_;
    for (int i = lo[0]; i <= hi[0]; ++i)
        for (int j = lo[1]; j <= hi[1]; ++j)
            for (int k = lo[2]; k <= hi[2]; ++k) {
                const int id = (i * grid_n_[1] + j) * grid_n_[2] + k;
                if ((x - centers_[id]).squaredNorm() < r2) out.push_back(id);
            }
}

CubeQuadrature BumpDictionary::support_quadrature(double panel_scale) const {
    const double width = support_.extent().maxCoeff();
    const int panels = std::max(
        1, static_cast<int>(std::ceil(panel_scale * width *
                                      opts_.panels_per_radius / rho_)));
    return CubeQuadrature(support_, panels, opts_.quad_points);
}

double BumpExpansion::value(const Vec3& x) const {
    thread_local std::vector<int> act;
    dict->active_centers(x, act);
    double v = 0.0;
    for (int j : act)
        v += coef[j] * bump_eval(x, dict->centers()[j], dict->rho()).value;
    return v;
}

Vec3 BumpExpansion::gradient(const Vec3& x) const {
    thread_local std::vector<int> act;
    dict->active_centers(x, act);
    Vec3 g = Vec3::Zero();
    for (int j : act)
        g += coef[j] * bump_eval(x, dict->centers()[j], dict->rho()).grad;
    return g;
}

Mat3 BumpExpansion::hessian(const Vec3& x) const {
    thread_local std::vector<int> act;
    dict->active_centers(x, act);
    Mat3 h = Mat3::Zero();
    for (int j : act)
        h += coef[j] * bump_eval(x, dict->centers()[j], dict->rho()).hess;
    return h;
}

ThirdTensor BumpExpansion::third(const Vec3& x) const {
    thread_local std::vector<int> act;
    dict->active_centers(x, act);
    ThirdTensor out = zero_third();
    for (int j : act) {
        const ThirdTensor t = bump_third(x, dict->centers()[j], dict->rho());
        for (int k = 0; k < 3; ++k) out[k] += coef[j] * t[k];
    }
    return out;
}

double BumpExpansion::sup_norm_estimate(int samples_per_axis) const {
    const Box& bx = dict->support_box();
    const Vec3 step = bx.extent() / (samples_per_axis - 1);
    double sup = 0.0;
    for (int i = 0; i < samples_per_axis; ++i)
        for (int j = 0; j < samples_per_axis; ++j)
            for (int k = 0; k < samples_per_axis; ++k) {
                const Vec3 x =
                    bx.lo + Vec3(i * step[0], j * step[1], k * step[2]);
                sup = std::max(sup, std::abs(value(x)));
            }
    return sup;
}

void BumpExpansion::project_to_constraints() {
    // remove the mean along the dictionary's smooth direction, then
    // M-normalize; repeated once to absorb roundoff
    for (int pass = 0; pass < 2; ++pass)
        coef -= dict->b().dot(coef) * dict->mean_direction();
    const double nrm = std::sqrt(coef.dot(dict->M() * coef));
    if (nrm <= 0.0)
        throw ConstructionError(
            "bump expansion collapsed to zero under the zero-mean constraint");
    coef /= nrm;
}

} // namespace forge
