#include "gansmooth/smoothness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <vector>

namespace gansmooth {

OracleFamily::OracleFamily(LossTag tag, KernelSpec kernel, BoxDomain domain, Sampler mu, Sampler mu0, bool fixed)
    : tag_(tag), kernel_(kernel), domain_(std::move(domain)), mu_(std::move(mu)), mu0_(std::move(mu0)),
      fixed_(fixed) {}

OracleFamily OracleFamily::random(LossTag tag, const BoxDomain& domain, KernelSpec kernel) {
    auto sampler = [domain](Rng& rng) { return random_measure(rng, domain); };
    return OracleFamily(tag, kernel, domain, sampler, sampler, false);
}

OracleFamily OracleFamily::fixed(LossTag tag, DiscreteMeasure mu, DiscreteMeasure mu0, KernelSpec kernel) {
    if (mu.dim() != mu0.dim()) throw Error(ErrorCode::DimensionMismatch, "family measures differ in dimension");
    BoxDomain box(mu.domain().lo.cwiseMin(mu0.domain().lo), mu.domain().hi.cwiseMax(mu0.domain().hi));
    return OracleFamily(
        tag, kernel, box, [mu](Rng&) { return mu; }, [mu0](Rng&) { return mu0; }, true);
}

std::pair<DiscreteMeasure, DiscreteMeasure> OracleFamily::draw(Rng& rng) const {
    DiscreteMeasure mu = mu_(rng);
    DiscreteMeasure mu0 = mu0_(rng);
    return {std::move(mu), std::move(mu0)};
}

DiscOracle OracleFamily::oracle(const DiscreteMeasure& mu, const DiscreteMeasure& mu0) const {
    std::optional<KernelSpec> k;
    if (tag_ == LossTag::mmd_sq_half) k = kernel_;
    return DiscOracle(LossKind(tag_, mu0, k), mu);
}

namespace {

void require_gradient(const OracleFamily& family) {
    if (family.tag() != LossTag::mmd_sq_half && family.tag() != LossTag::wasserstein1)
        throw Error(ErrorCode::GradientUnsupported, "estimators need MMD or W1 (1-D) discriminators");
}

void record(Estimate& e, double ratio) {
    ++e.samples;
    if (ratio > kSaturation) e.saturated = true;
    e.value = std::max(e.value, std::min(ratio, kSaturation));
}

std::vector<double> grid_1d(const BoxDomain& domain, int pts) {
    std::vector<double> g(pts);
    for (int i = 0; i < pts; ++i)
        g[i] = pts == 1 ? domain.lo[0] : domain.lo[0] + (domain.hi[0] - domain.lo[0]) * i / (pts - 1);
    return g;
}

// Query points: the uniform grid in 1-D, uniform samples of the box otherwise.
Mat query_points(const BoxDomain& domain, int pts, Rng& rng) {
    const int d = domain.dim();
    Mat q(pts, d);
    if (d == 1) {
        const auto g = grid_1d(domain, pts);
        for (int i = 0; i < pts; ++i) q(i, 0) = g[i];
    } else {
        for (int i = 0; i < pts; ++i)
            for (int j = 0; j < d; ++j) q(i, j) = rng.uniform(domain.lo[j], domain.hi[j]);
    }
    return q;
}

Vec random_direction(Rng& rng, int d) {
    Vec u(d);
    do {
        for (int j = 0; j < d; ++j) u[j] = rng.normal();
    } while (u.norm() < 1e-12);
    return u.normalized();
}

DiscreteMeasure moved(const DiscreteMeasure& mu, const Mat& shift, const BoxDomain& domain) {
    Mat pts = mu.points() + shift;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) = domain.clamp(pts.row(i).transpose()).transpose();
    return make_discrete(pts, mu.weights(), domain);
}

}  // namespace

Estimate estimate_alpha(const OracleFamily& family, const BoxDomain& domain, int n_measures, int grid_pts,
                        std::uint64_t seed) {
    require_gradient(family);
    Estimate est;
    for (int t = 0; t < n_measures; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        const auto [mu, mu0] = family.draw(rng);
        const DiscOracle phi = family.oracle(mu, mu0);
        if (family.tag() == LossTag::wasserstein1) {
            const auto g = grid_1d(domain, grid_pts);
            for (std::size_t i = 0; i + 1 < g.size(); ++i) {
                const double a = phi.value(Vec::Constant(1, g[i]));
                const double b = phi.value(Vec::Constant(1, g[i + 1]));
                record(est, std::abs(b - a) / (g[i + 1] - g[i]));
            }
            continue;
        }
        const Mat q = query_points(domain, grid_pts, rng);
        for (Eigen::Index i = 0; i < q.rows(); ++i) record(est, phi.grad(q.row(i).transpose()).norm());
    }
    return est;
}

Estimate estimate_beta1(const OracleFamily& family, const BoxDomain& domain, int n_measures, int n_point_pairs,
                        std::uint64_t seed, int grid_pts) {
    require_gradient(family);
    const int d = domain.dim();
    const double diam = (domain.hi - domain.lo).norm();
    Estimate est;
    for (int t = 0; t < n_measures; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        const auto [mu, mu0] = family.draw(rng);
        const DiscOracle phi = family.oracle(mu, mu0);
        for (int p = 0; p < n_point_pairs; ++p) {
            Vec x(d);
            for (int j = 0; j < d; ++j) x[j] = rng.uniform(domain.lo[j], domain.hi[j]);
            const double r = diam * std::pow(10.0, rng.uniform(-4.0, -0.5));
            const Vec y = domain.clamp(x + r * random_direction(rng, d));
            const double dist = (x - y).norm();
            if (dist <= 0.0) continue;
            record(est, (phi.grad(x) - phi.grad(y)).norm() / dist);
        }
        // Gradient kinks sit on atoms, so probe a tiny pair straddling each one.
        const SignedMeasure xi = diff(mu, mu0);
        for (int a = 0; a < xi.size(); ++a) {
            const Vec c = xi.points().row(a).transpose();
            const Vec u = 1e-9 * diam * random_direction(rng, d);
            const Vec x = domain.clamp(c - u);
            const Vec y = domain.clamp(c + u);
            const double dist = (x - y).norm();
            if (dist > 0.0) record(est, (phi.grad(x) - phi.grad(y)).norm() / dist);
        }
        if (d == 1 && grid_pts >= 2) {
            const auto g = grid_1d(domain, grid_pts);
            double prev = phi.grad(Vec::Constant(1, g[0]))[0];
            for (std::size_t i = 1; i < g.size(); ++i) {
                const double cur = phi.grad(Vec::Constant(1, g[i]))[0];
                record(est, std::abs(cur - prev) / (g[i] - g[i - 1]));
                prev = cur;
            }
        }
    }
    return est;
}

Estimate estimate_beta2(const OracleFamily& family, const BoxDomain& domain, int n_measure_pairs, int grid_pts,
                        std::uint64_t seed) {
    require_gradient(family);
    const int d = domain.dim();
    const double half_width = 0.5 * (domain.hi - domain.lo).minCoeff();
    Estimate est;
    for (int t = 0; t < n_measure_pairs; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        auto [mu, mu0] = family.draw(rng);
        const double eps = half_width * std::pow(10.0, rng.uniform(-3.0, -1.0));
        DiscreteMeasure nu = mu;
        switch (t % 3) {
            case 0: nu = family.draw(rng).first; break;
            case 1: {
                Mat shift(mu.size(), d);
                for (Eigen::Index i = 0; i < shift.rows(); ++i)
                    shift.row(i) = eps * rng.uniform() * random_direction(rng, d).transpose();
                nu = moved(mu, shift, domain);
                break;
            }
            default: {
                const Vec dir = eps * random_direction(rng, d);
                nu = moved(mu, dir.transpose().replicate(mu.size(), 1), domain);
                break;
            }
        }
        const double dist = w1(mu, nu);
        if (!(dist > 1e-15)) continue;
        const DiscOracle phi_mu = family.oracle(mu, mu0);
        const DiscOracle phi_nu = family.oracle(nu, mu0);
        Mat q = query_points(domain, grid_pts, rng);
        if (d > 1) {
            // Atoms are where kernel gradients change fastest.
            Mat extra(q.rows() + mu.size() + nu.size(), d);
            extra << q, mu.points(), nu.points();
            q = std::move(extra);
        }
        double sup = 0.0;
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            const Vec x = q.row(i).transpose();
            sup = std::max(sup, (phi_mu.grad(x) - phi_nu.grad(x)).norm());
        }
        record(est, sup / dist);
    }
    return est;
}

double bregman(const LossKind& kind, const DiscreteMeasure& nu, const DiscreteMeasure& mu) {
    if (nu.dim() != mu.dim() || mu.dim() != kind.reference().dim())
        throw Error(ErrorCode::DimensionMismatch, "bregman measures differ in dimension");
    const double j_mu = loss_eval(kind, mu);
    if (!std::isfinite(j_mu))
        throw Error(ErrorCode::PreconditionViolated, "Bregman divergence undefined where J(mu) is infinite");
    const SignedMeasure xi = diff(nu, mu);
    const DiscOracle phi(kind, mu);
    double pairing = 0.0;
    for (int i = 0; i < xi.size(); ++i) {
        const double w = xi.weights()[i];
        if (w == 0.0) continue;
        const double v = phi.value(xi.points().row(i).transpose());
        if (std::isinf(v)) {
            // Phi_mu = -inf only where mu vanishes, so the pairing diverges to -inf.
            if ((v < 0) == (w > 0)) return kInf;
            throw Error(ErrorCode::PreconditionViolated, "Bregman pairing is undefined");
        }
        pairing += w * v;
    }
    const double j_nu = loss_eval(kind, nu);
    if (std::isinf(j_nu)) return kInf;
    return j_nu - j_mu - pairing;
}

BregmanBoundResult bregman_kr_bound_check(const LossKind& kind, std::span<const MeasurePair> pairs, double beta2) {
    BregmanBoundResult out;
    for (const auto& p : pairs) {
        const double kr = kr_norm_1d(diff(p.mu, p.nu));
        if (kr <= 1e-15) {
            ++out.excluded;
            continue;
        }
        ++out.used;
        const double div = bregman(kind, p.nu, p.mu);
        if (std::isinf(div)) {
            out.unbounded = true;
            out.worst_ratio = kInf;
            continue;
        }
        out.worst_ratio = std::max(out.worst_ratio, div / (0.5 * kr * kr));
    }
    out.within_bound = !out.unbounded && out.worst_ratio <= beta2;
    return out;
}

double kernel_cross_hessian_norm(const KernelSpec& k, const Eigen::Ref<const Vec>& x,
                                 const Eigen::Ref<const Vec>& y) {
    if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "cross-Hessian arguments");
    const int d = static_cast<int>(x.size());
    const double z = (x - y).squaredNorm() / (2.0 * k.sigma_sq);
    const double scale = k.prefactor(d) * std::exp(-z) / k.sigma_sq;
    // Eigenvalue |2z - 1| along x - y; 1 on its orthogonal complement (d >= 2).
    const double along = std::abs(2.0 * z - 1.0);
    return scale * (d >= 2 ? std::max(along, 1.0) : along);
}

SmoothnessReport smoothness_report(LossTag tag, int dim, int n_trials, std::uint64_t seed, KernelSpec kernel,
                                   int grid_pts) {
    if (tag == LossTag::wasserstein1 && dim != 1)
        throw Error(ErrorCode::DimensionMismatch, "W1 potentials are available in 1-D only");
    const BoxDomain box = BoxDomain::unit(dim);
    const OracleFamily family = OracleFamily::random(tag, box, kernel);
    SmoothnessReport r;
    r.loss = std::string(to_string(tag));
    r.dim = dim;
    r.n_trials = n_trials;
    r.seed = seed;
    r.grid_step = 2.0 / (grid_pts - 1);
    r.alpha = estimate_alpha(family, box, n_trials, grid_pts, derive_seed(seed, 1));
    r.beta1 = estimate_beta1(family, box, n_trials, 20, derive_seed(seed, 2), dim == 1 ? grid_pts : 0);
    const int pairs = dim == 1 ? n_trials : std::max(1, n_trials / 5);
    r.beta2 = estimate_beta2(family, box, pairs, grid_pts, derive_seed(seed, 3));
    return r;
}

std::string to_json(const SmoothnessReport& report) {
    auto est = [](const Estimate& e) {
        return nlohmann::ordered_json{{"value", e.value}, {"saturated", e.saturated}, {"samples", e.samples}};
    };
    nlohmann::ordered_json j{{"loss", report.loss},
                             {"d", report.dim},
                             {"alpha_hat", est(report.alpha)},
                             {"beta1_hat", est(report.beta1)},
                             {"beta2_hat", est(report.beta2)},
                             {"n_trials", report.n_trials},
                             {"grid_step", report.grid_step},
                             {"seed", report.seed}};
    return j.dump(2);
}

}  // namespace gansmooth
