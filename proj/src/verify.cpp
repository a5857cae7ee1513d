#include "gansmooth/verify.hpp"

#include "gansmooth/divergences.hpp"
#include "gansmooth/envelopes.hpp"
#include "gansmooth/nnsmooth.hpp"
#include "gansmooth/rkhs.hpp"
#include "gansmooth/smoothness.hpp"
#include "gansmooth/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>

namespace gansmooth::verify {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

CheckResult upper(std::string id, std::string name, double observed, double bound, std::string detail = {}) {
    return {std::move(id), std::move(name), observed <= bound, observed, "<= " + num(bound), std::move(detail)};
}

CheckResult lower(std::string id, std::string name, double observed, double bound, std::string detail = {}) {
    return {std::move(id), std::move(name), observed >= bound, observed, ">= " + num(bound), std::move(detail)};
}

CheckResult within(std::string id, std::string name, double observed, double lo, double hi, std::string detail = {}) {
    return {std::move(id), std::move(name), observed >= lo && observed <= hi, observed,
            "[" + num(lo) + ", " + num(hi) + "]", std::move(detail)};
}

DiscreteMeasure point_mass(double x) { return dirac(x); }

// ---------------------------------------------------------------- divergences

void divergences_suite(const Options& opts, std::vector<CheckResult>& out) {
    const KernelSpec k = KernelSpec::critical();
    const DiscreteMeasure d0 = point_mass(0.0), d1 = point_mass(1.0);
    Mat two(2, 1);
    two << 0.0, 1.0;
    const DiscreteMeasure half = make_discrete(two, Vec::Constant(2, 0.5));

    out.push_back(upper("C7", "mmd_sq(d0, d1) = 2 - 2 exp(-pi)", std::abs(mmd_sq(d0, d1, k) - (2.0 - 2.0 * std::exp(-kPi))), 1e-12));
    out.push_back(upper("C7", "mmd_sq(half, d0) = (1 - exp(-pi)) / 2",
                        std::abs(mmd_sq(half, d0, k) - 0.5 * (1.0 - std::exp(-kPi))), 1e-12));

    Rng rng(derive_seed(opts.seed, 0x773161));
    const BoxDomain box = BoxDomain::unit(1);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const DiscreteMeasure mu = random_measure(rng, box, 1, 8);
        const DiscreteMeasure nu = random_measure(rng, box, 1, 8);
        worst = std::max(worst, std::abs(w1_1d(mu, nu) - w1_lp(mu, nu)));
    }
    out.push_back(upper("C7", "w1_1d matches the transport LP", worst, 1e-9, "100 random 1-D pairs, <= 8 atoms"));

    const double x = 1e-3;
    const double ratio = js(point_mass(x), d0) / w1(point_mass(x), d0);
    out.push_back(lower("C7", "JS / W1 blow-up at x = 1e-3", ratio, 690.0));
}

// ---------------------------------------------------------------- smoothness

void smoothness_suite(const Options& opts, std::vector<CheckResult>& out) {
    const KernelSpec k = KernelSpec::critical();
    const BoxDomain box1 = BoxDomain::unit(1);
    const double two_pi = 2.0 * kPi;

    {
        const auto t0 = Clock::now();
        const OracleFamily fam = OracleFamily::random(LossTag::mmd_sq_half, box1, k);
        const Estimate b2 = estimate_beta2(fam, box1, 500, 201, derive_seed(opts.seed, 0x6232));
        const double sec = seconds_since(t0);
        out.push_back(within("C4", "beta2 estimate for the critical-kernel MMD", b2.value, 0.6 * two_pi, 1.01 * two_pi,
                             std::to_string(b2.samples) + " pairs"));
        out.push_back(upper("C4", "beta2 estimation runtime (s)", sec, 30.0));
    }

    {
        Rng rng(derive_seed(opts.seed, 0x627265));
        double worst = 0.0;
        for (int t = 0; t < 200; ++t) {
            const BoxDomain box = BoxDomain::unit(1 + t % 2);
            const DiscreteMeasure mu0 = random_measure(rng, box);
            const DiscreteMeasure mu = random_measure(rng, box);
            const DiscreteMeasure nu = random_measure(rng, box);
            const LossKind kind = LossKind::mmd(mu0, k);
            worst = std::max(worst, std::abs(bregman(kind, nu, mu) - 0.5 * mmd_sq(nu, mu, k)));
        }
        out.push_back(upper("C5", "Bregman divergence of MMD^2/2 equals MMD^2/2", worst, 1e-10, "200 random pairs (1-D and 2-D)"));
    }

    {
        double sup = 0.0, at_diag = 0.0;
        constexpr int n = 201;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const Vec x = Vec::Constant(1, -1.0 + 0.01 * i);
                const Vec y = Vec::Constant(1, -1.0 + 0.01 * j);
                const double v = kernel_cross_hessian_norm(k, x, y);
                sup = std::max(sup, v);
                if (i == j) at_diag = std::max(at_diag, v);
            }
        }
        Rng rng(derive_seed(opts.seed, 0x786832));
        for (int t = 0; t < 2000; ++t) {
            Vec x(2), y(2);
            x << rng.uniform(-1, 1), rng.uniform(-1, 1);
            y << rng.uniform(-1, 1), rng.uniform(-1, 1);
            sup = std::max(sup, kernel_cross_hessian_norm(k, x, y));
        }
        out.push_back(upper("C6", "grid sup of the kernel cross-Hessian norm equals 1/sigma^2",
                            std::abs(sup - k.inv_sigma_sq()), 1e-12, "sup = " + num(sup)));
        out.push_back(upper("C6", "cross-Hessian sup is attained at x = y", std::abs(sup - at_diag), 0.0));

        Rng prng(derive_seed(opts.seed, 0x6b72));
        double ratio = 0.0;
        for (int t = 0; t < 200; ++t) {
            const DiscreteMeasure mu = random_measure(prng, box1);
            const DiscreteMeasure nu = random_measure(prng, box1);
            const double kr = kr_norm_1d(diff(mu, nu));
            if (kr <= 0.0) continue;
            ratio = std::max(ratio, mmd_sq(mu, nu, k) / (k.inv_sigma_sq() * kr * kr));
        }
        out.push_back(upper("C6", "MMD^2 / ((1/sigma^2) |mu - nu|_KR^2)", ratio, 1.0, "200 random 1-D pairs"));
    }

    {
        const SmoothnessReport r = smoothness_report(LossTag::mmd_sq_half, 1, 500, derive_seed(opts.seed, 0x7265));
        const double a_bound = 2.0 * std::sqrt(two_pi) * std::exp(-0.5);
        out.push_back(within("inv", "alpha estimate within [60%, 100%] of 2 sqrt(2 pi) e^-1/2", r.alpha.value, 0.6 * a_bound,
                             a_bound));
        out.push_back(upper("inv", "beta1 estimate below 4 pi", r.beta1.value, 2.0 * two_pi));
        out.push_back(lower("inv", "beta1 estimate reaches 60% of 4 pi", r.beta1.value, 0.6 * 2.0 * two_pi));

        const SmoothnessReport w = smoothness_report(LossTag::wasserstein1, 1, 100, derive_seed(opts.seed, 0x7731));
        out.push_back(upper("inv", "W1 potential alpha estimate", w.alpha.value, 1.0 + 1e-9));

        Mat pts(2, 1);
        pts << -1.0, 1.0;
        const OracleFamily kink =
            OracleFamily::fixed(LossTag::wasserstein1, make_discrete(pts, Vec::Constant(2, 0.5)), point_mass(0.0));
        const Estimate b1 = estimate_beta1(kink, box1, 1, 20, opts.seed, 101);
        out.push_back({"inv", "W1 potential of (d-1 + d1)/2 saturates beta1", b1.saturated, b1.value, "saturated", {}});

        Rng rng(derive_seed(opts.seed, 0x6b7262));
        std::vector<MeasurePair> pairs;
        for (int t = 0; t < 200; ++t) pairs.push_back({random_measure(rng, box1), random_measure(rng, box1)});
        const BregmanBoundResult br = bregman_kr_bound_check(LossKind::mmd(random_measure(rng, box1), k), pairs, two_pi);
        out.push_back(upper("inv", "Bregman / (|mu - nu|_KR^2 / 2) for the MMD", br.worst_ratio, two_pi));
    }
}

// ---------------------------------------------------------------- envelopes

void envelopes_suite(const Options& opts, std::vector<CheckResult>& out) {
    const BoxDomain line(Vec::Constant(1, -2.0), Vec::Constant(1, 2.0));
    const double h = 1e-3;

    {
        const BoxDomain wide(Vec::Constant(1, -3.0), Vec::Constant(1, 3.0));
        const GridFn f = GridFn::sample(wide, h, [](const Vec& x) { return std::abs(x[0]); });
        const GridFn m = moreau(f, 1.0);
        double worst = 0.0;
        for (int i = 0; i < m.size(); ++i) {
            const double x = m.node(i)[0];
            const double huber = std::abs(x) <= 1.0 ? 0.5 * x * x : std::abs(x) - 0.5;
            worst = std::max(worst, std::abs(m[i] - huber));
        }
        out.push_back(upper("C8", "Moreau envelope of |x| is the Huber function", worst, 2e-3, "[-3,3], step 1e-3"));
    }

    {
        const double alpha = 1.0;
        const GridFn f = GridFn::sample(line, h, [](const Vec& x) { return 4.0 * x[0] * x[0] + (x[0] > 0.3 ? 2.0 : 0.0); });
        out.push_back(upper("C8", "Pasch-Hausdorff envelope slope", max_slope(pasch_hausdorff(f, alpha)), alpha + 2.0 * h));
    }

    {
        const double beta = 2.0;
        const GridFn f =
            GridFn::sample(line, h, [](const Vec& x) { return std::abs(x[0]) + 2.0 * std::abs(x[0] - 0.5); });
        out.push_back(upper("C8", "Moreau envelope second difference", max_second_difference(moreau(f, beta)), beta + h));
    }

    {
        const double step = 1e-2;
        const GridFn f = GridFn::sample(line, step, [](const Vec& x) { return x[0] * x[0]; });
        const GridFn g = GridFn::sample(line, step, [](const Vec& x) { return std::abs(x[0]); });
        out.push_back(upper("C8", "conjugate of inf-convolution is the sum of conjugates",
                            conjugate_sum_identity_check(f, g), 2.0 * step, "step 1e-2"));
    }

    {
        Rng rng(derive_seed(opts.seed, 0x6d696e));
        int ok = 0;
        constexpr int n = 20;
        for (int t = 0; t < n; ++t) {
            const bool planar = t % 4 == 3;
            const BoxDomain box = BoxDomain::unit(planar ? 2 : 1);
            const double step = planar ? 0.05 : 0.01;
            const int terms = rng.uniform_int(1, 4);
            std::vector<Vec> centers;
            std::vector<double> weights;
            for (int j = 0; j < terms; ++j) {
                Vec c(box.dim());
                for (int a = 0; a < box.dim(); ++a) c[a] = rng.uniform(-0.8, 0.8);
                centers.push_back(c);
                weights.push_back(rng.uniform(0.2, 2.0));
            }
            const double curv = rng.uniform(0.0, 1.0);
            const GridFn f = GridFn::sample(box, step, [&](const Vec& x) {
                double v = curv * x.squaredNorm();
                for (int j = 0; j < terms; ++j) v += weights[j] * (x - centers[j]).norm();
                return v;
            });
            const double c = rng.uniform(0.5, 3.0);
            const bool quad = t % 2 == 0;
            const GridFn g = GridFn::sample(box, step, [&](const Vec& x) {
                return quad ? 0.5 * c * x.squaredNorm() : c * x.norm();
            });
            if (minimizer_invariance_check(f, g)) ++ok;
        }
        out.push_back({"C8", "minimizer invariance on random convex instances", ok == n, double(ok),
                       "== " + std::to_string(n), "instances passing"});
    }
}

// ---------------------------------------------------------------- rkhs

void rkhs_suite(const Options& opts, std::vector<CheckResult>& out) {
    const KernelSpec k = KernelSpec::critical();
    const EmbeddingFn f{Vec::Zero(1), Vec::Ones(1), k};
    const std::vector<double> s = truncated_series_norm(f, 20);
    bool monotone = true;
    for (std::size_t i = 1; i < s.size(); ++i) monotone = monotone && s[i] >= s[i - 1];
    out.push_back({"C10", "partial sums are nondecreasing", monotone, s.back(), "nondecreasing", "S_20 shown"});
    out.push_back(upper("C10", "|S_20 - 1|", std::abs(s[20] - 1.0), 0.01));
    out.push_back(upper("C10", "|S_0 - 1/sqrt(2)|", std::abs(s[0] - 1.0 / std::sqrt(2.0)), 1e-6));

    Rng rng(derive_seed(opts.seed, 0x726b));
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const BoxDomain box = BoxDomain::unit(1 + t % 2);
        const DiscreteMeasure mu = random_measure(rng, box);
        const DiscreteMeasure nu = random_measure(rng, box);
        worst = std::max(worst, std::abs(embedding_norm_sq(diff(mu, nu), k) - mmd_sq(mu, nu, k)));
    }
    out.push_back(upper("inv", "embedding norm of mu - nu equals mmd_sq", worst, 1e-12));
}

// ---------------------------------------------------------------- nnsmooth

void nnsmooth_suite(const Options& opts, std::vector<CheckResult>& out) {
    const BoxDomain box = BoxDomain::unit(2);
    {
        const auto t0 = Clock::now();
        double worst_smooth = 0.0, worst_lip = 0.0, worst_norm = 0.0;
        std::string detail;
        for (int depth = 1; depth <= 7; ++depth) {
            const int width = depth % 2 == 0 ? 32 : 16;
            const MlpNet net = make_mlp(2, width, depth, Activation::elu, 1.0, derive_seed(opts.seed, 100 + depth));
            const double s = empirical_smoothness(net, box, 2000, derive_seed(opts.seed, 200 + depth));
            const double l = empirical_lipschitz(net, box, 2000, derive_seed(opts.seed, 300 + depth));
            worst_smooth = std::max(worst_smooth, s / depth);
            worst_lip = std::max(worst_lip, l);
            worst_norm = std::max(worst_norm, max_layer_norm(net));
            detail += (detail.empty() ? "" : " ") + ("k" + std::to_string(depth) + ":" + num(s));
        }
        out.push_back(upper("C9", "max_k smoothness estimate / k", worst_smooth, 1.0 + 1e-3, detail));
        out.push_back(upper("C9", "Lipschitz estimate (final_scale 1)", worst_lip, 1.0 + 1e-3));
        out.push_back(upper("C9", "layer operator norms after normalization", worst_norm, 1.0 + 1e-6));

        const MlpNet scaled = make_mlp(2, 16, 3, Activation::elu, 2.5, derive_seed(opts.seed, 400));
        out.push_back(upper("C9", "Lipschitz estimate / final_scale (final_scale 2.5)",
                            empirical_lipschitz(scaled, box, 2000, derive_seed(opts.seed, 401)) / 2.5, 1.0 + 1e-3));
        out.push_back(upper("C9", "network bound runtime (s)", seconds_since(t0), 60.0));
    }

    {
        Rng rng(derive_seed(opts.seed, 0x6664));
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            const int d = rng.uniform_int(1, 3);
            const Activation act = t % 2 == 0 ? Activation::elu : Activation::sigmoid;
            const MlpNet net = make_mlp(d, rng.uniform_int(2, 16), rng.uniform_int(1, 5), act, rng.uniform(0.5, 3.0),
                                        derive_seed(opts.seed, 500 + t), t % 3 != 0);
            Vec x(d);
            for (int a = 0; a < d; ++a) x[a] = rng.uniform(-1.0, 1.0);
            const Vec g = mlp_input_grad(net, x);
            constexpr double e = 1e-5;
            for (int a = 0; a < d; ++a) {
                Vec xp = x, xm = x;
                xp[a] += e;
                xm[a] -= e;
                const double fd = (mlp_forward(net, xp) - mlp_forward(net, xm)) / (2.0 * e);
                worst = std::max(worst, std::abs(fd - g[a]));
            }
        }
        out.push_back(upper("C11", "mlp_input_grad vs central differences", worst, 1e-5, "20 random networks"));
    }

    {
        Rng rng(derive_seed(opts.seed, 0x7376));
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            Mat w(5, 5);
            for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.normal();
            Eigen::JacobiSVD<Mat> svd(w);
            const double est = power_iteration_specnorm(w, 200, derive_seed(opts.seed, t));
            worst = std::max(worst, std::abs(est - svd.singularValues()[0]));
        }
        out.push_back(upper("inv", "power iteration vs SVD on random 5x5", worst, 1e-6));
    }
}

// ---------------------------------------------------------------- trainer

void trainer_suite(const Options& opts, std::vector<CheckResult>& out) {
    double worst_ratio = 0.0, worst_descent = -kInf, worst_runtime = 0.0, min_unstable = kInf;
    int bound_fail = 0, unstable_ok = 0, runs = 0;
    for (const TargetKind kind : {TargetKind::ring, TargetKind::gaussian_mixture}) {
        for (const int n : {16, 64}) {
            for (std::uint64_t s = 0; s < 3; ++s) {
                const std::uint64_t seed = derive_seed(opts.seed, 1000 + s);
                TrainConfig cfg;
                cfg.target = sample_target(kind, n, derive_seed(seed, 0x746172), 2);
                cfg.n_particles = n;
                cfg.n_steps = 10000;
                cfg.seed = seed;
                cfg.beta1_bound = opts.trainer_beta1;
                cfg.beta2_bound = opts.trainer_beta2;

                const auto t0 = Clock::now();
                const TrainTrace tr = train_particles(cfg);
                worst_runtime = std::max(worst_runtime, seconds_since(t0));
                const StationarityCheck st = stationarity_bound(tr, tr.lipschitz_l, tr.bound_reference());
                worst_ratio = std::max(worst_ratio, st.worst_ratio);
                if (!st.holds) ++bound_fail;
                worst_descent = std::max(worst_descent, descent_violation(tr, tr.lipschitz_l));

                cfg.lr_ratio = 1e4;
                const TrainTrace wild = train_particles(cfg);
                const double frac = wild.nonmonotone_fraction();
                min_unstable = std::min(min_unstable, wild.diverged ? 1.0 : frac);
                if (wild.diverged || frac >= 0.1) ++unstable_ok;
                ++runs;
            }
        }
    }
    out.push_back({"C1", "stationarity bound min g^2 <= (2L/n) J0 for all n <= 1e4", bound_fail == 0, worst_ratio,
                   "<= 1 (1e-9 rel.)", std::to_string(runs) + " runs; worst ratio shown"});
    out.push_back(upper("C1", "slowest particle run (s)", worst_runtime, 60.0));
    out.push_back(upper("C2", "descent inequality J_{k+1} - J_k + g_k^2/(2L)", worst_descent, 1e-9));
    out.push_back({"C3", "instability at 1e4 gamma0 (diverged or >= 10% nonmonotone)", unstable_ok == runs, min_unstable,
                   ">= 0.1 on every run", "minimum nonmonotone fraction shown"});

    {
        Rng rng(derive_seed(opts.seed, 0x706772));
        const KernelSpec k = KernelSpec::critical();
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            const int d = rng.uniform_int(1, 2);
            const int n = rng.uniform_int(1, 16);
            const BoxDomain box = BoxDomain::unit(d);
            const DiscreteMeasure mu0 = random_measure(rng, box);
            ParticleGenerator gen;
            gen.theta.resize(n, d);
            for (Eigen::Index i = 0; i < gen.theta.size(); ++i) gen.theta.data()[i] = rng.uniform(-1.0, 1.0);
            const Mat g = mmd_particle_grad(gen, mu0, k);
            constexpr double e = 1e-5;
            for (Eigen::Index i = 0; i < gen.theta.size(); ++i) {
                ParticleGenerator p = gen, m = gen;
                p.theta.data()[i] += e;
                m.theta.data()[i] -= e;
                const double fd = (mmd_particle_loss(p, mu0, k) - mmd_particle_loss(m, mu0, k)) / (2.0 * e);
                worst = std::max(worst, std::abs(fd - g.data()[i]));
            }
        }
        out.push_back(upper("C11", "mmd_particle_grad vs central differences", worst, 1e-6, "20 random configurations"));
    }

    {
        GanLoopConfig cfg;
        cfg.seed = derive_seed(opts.seed, 0x67616e);
        cfg.n_particles = 16;
        cfg.target = sample_target(TargetKind::ring, 16, derive_seed(cfg.seed, 0x746172), 2);
        cfg.beta2 = opts.trainer_beta2;
        const TrainTrace tr = train_gan2d(cfg);
        const double g0 = tr.steps.front().grad_norm;
        double gmax = 0.0;
        for (const auto& r : tr.steps) gmax = std::max(gmax, r.grad_norm);
        const double norm = *std::max_element(tr.disc_norms.begin(), tr.disc_norms.end());
        out.push_back(upper("C12", "gan2d max generator gradient / initial", g0 > 0.0 ? gmax / g0 : kInf, 10.0,
                            std::to_string(tr.steps.size()) + " steps" + (tr.diverged ? ", diverged" : "")));
        out.push_back(upper("C12", "gan2d discriminator operator norms", norm, 1.0 + 1e-6));
    }

    {
        // The step size above trusts beta1 and beta2; both must dominate what the
        // critical-kernel oracles actually exhibit.
        const KernelSpec k = KernelSpec::critical();
        const BoxDomain box1 = BoxDomain::unit(1), box2 = BoxDomain::unit(2);
        const Estimate b1 = estimate_beta1(OracleFamily::random(LossTag::mmd_sq_half, box2, k), box2, 200, 20,
                                           derive_seed(opts.seed, 0x636231));
        const Estimate b2 = estimate_beta2(OracleFamily::random(LossTag::mmd_sq_half, box1, k), box1, 500, 201,
                                           derive_seed(opts.seed, 0x636232));
        out.push_back(upper("cert", "beta1 estimate vs configured beta1", b1.value, opts.trainer_beta1));
        out.push_back(upper("cert", "beta2 estimate vs configured beta2", b2.value, opts.trainer_beta2 * 1.01));
    }
}

}  // namespace

std::vector<CheckResult> run_suite(std::string_view suite, const Options& opts) {
    std::vector<CheckResult> out;
    const bool all = suite == "all";
    bool known = all;
    auto maybe = [&](std::string_view name, void (*fn)(const Options&, std::vector<CheckResult>&)) {
        if (all || suite == name) {
            known = true;
            fn(opts, out);
        }
    };
    maybe("divergences", divergences_suite);
    maybe("smoothness", smoothness_suite);
    maybe("envelopes", envelopes_suite);
    maybe("rkhs", rkhs_suite);
    maybe("nnsmooth", nnsmooth_suite);
    maybe("trainer", trainer_suite);
    if (!known) throw Error(ErrorCode::ConfigError, "unknown suite '" + std::string(suite) + "'");
    return out;
}

std::string format(const CheckResult& r) {
    std::string s = (r.pass ? "PASS " : "FAIL ") + r.id + " " + r.name + ": observed=" + num(r.observed) +
                    " bound=" + r.bound;
    if (!r.detail.empty()) s += " (" + r.detail + ")";
    return s;
}

void print(std::ostream& os, const std::vector<CheckResult>& results) {
    for (const auto& r : results) os << format(r) << '\n';
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
}

}  // namespace gansmooth::verify
