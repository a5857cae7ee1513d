#include "gansmooth/smoothness.hpp"

#include <doctest.h>

using namespace gansmooth;

namespace {
DiscreteMeasure two_point(double a, double wa, double b, double wb) {
    Mat p(2, 1);
    p << a, b;
    Vec w(2);
    w << wa, wb;
    return make_discrete(p, w);
}
const double kAlphaBound = 2.0 * std::sqrt(2.0 * kPi) * std::exp(-0.5);
}  // namespace

TEST_CASE("alpha estimates") {
    const BoxDomain box = BoxDomain::unit(1);
    const auto w1 = estimate_alpha(OracleFamily::random(LossTag::wasserstein1, box), box, 100, 101, 1);
    CHECK(w1.value <= 1.0 + 1e-9);
    const auto mmd = estimate_alpha(OracleFamily::random(LossTag::mmd_sq_half, box), box, 100, 101, 1);
    CHECK(mmd.value <= kAlphaBound);
    CHECK(mmd.value > 0.0);
    const auto m = two_point(-0.5, 0.3, 0.4, 0.7);
    const auto zero = estimate_alpha(OracleFamily::fixed(LossTag::mmd_sq_half, m, m), box, 3, 101, 1);
    CHECK(zero.value == 0.0);
    CHECK_THROWS_AS(estimate_alpha(OracleFamily::random(LossTag::minimax_js, box), box, 3, 11, 1), Error);
}

TEST_CASE("estimates grow with the trial set") {
    const BoxDomain box = BoxDomain::unit(1);
    const auto fam = OracleFamily::random(LossTag::mmd_sq_half, box);
    CHECK(estimate_alpha(fam, box, 10, 51, 4).value <= estimate_alpha(fam, box, 40, 51, 4).value);
    CHECK(estimate_beta1(fam, box, 10, 10, 4).value <= estimate_beta1(fam, box, 40, 10, 4).value);
    CHECK(estimate_beta2(fam, box, 10, 51, 4).value <= estimate_beta2(fam, box, 40, 51, 4).value);
}

TEST_CASE("beta1 estimates") {
    const BoxDomain box = BoxDomain::unit(1);
    const auto mmd = estimate_beta1(OracleFamily::random(LossTag::mmd_sq_half, box), box, 200, 20, 2, 101);
    CHECK(mmd.value <= 4.0 * kPi);
    CHECK_FALSE(mmd.saturated);
    const auto m = two_point(-0.5, 0.3, 0.4, 0.7);
    CHECK(estimate_beta1(OracleFamily::fixed(LossTag::mmd_sq_half, m, m), box, 2, 20, 2).value == 0.0);

    const auto kink = OracleFamily::fixed(LossTag::wasserstein1, two_point(-1.0, 0.5, 1.0, 0.5), dirac(0.0));
    CHECK(estimate_beta1(kink, box, 1, 20, 2).saturated);
    // Grid-only estimate: the slope jump across 0 forces at least 1/h.
    for (int pts : {11, 101, 1001}) {
        const double h = 2.0 / (pts - 1);
        CHECK(estimate_beta1(kink, box, 1, 0, 2, pts).value >= 1.0 / h);
    }
}

TEST_CASE("beta2 estimates") {
    const BoxDomain box = BoxDomain::unit(1);
    const auto crit = estimate_beta2(OracleFamily::random(LossTag::mmd_sq_half, box), box, 300, 101, 3);
    CHECK(crit.value <= 2.0 * kPi * 1.01);
    const auto wide = estimate_beta2(OracleFamily::random(LossTag::mmd_sq_half, box, KernelSpec(1.0)), box, 300, 101, 3);
    CHECK(wide.value <= 1.01);

    const auto m = two_point(-0.5, 0.3, 0.4, 0.7);
    const auto same = estimate_beta2(OracleFamily::fixed(LossTag::mmd_sq_half, m, dirac(0.0)), box, 1, 11, 3);
    CHECK(same.samples == 0);
}

TEST_CASE("bregman divergences") {
    const KernelSpec k = KernelSpec::critical();
    Rng rng(31);
    for (int t = 0; t < 30; ++t) {
        const auto mu0 = random_measure(rng, BoxDomain::unit(2));
        const auto mu = random_measure(rng, BoxDomain::unit(2));
        const auto nu = random_measure(rng, BoxDomain::unit(2));
        const LossKind kind = LossKind::mmd(mu0, k);
        CHECK(std::abs(bregman(kind, nu, mu) - 0.5 * mmd_sq(nu, mu, k)) <= 1e-10);
        CHECK(std::abs(bregman(kind, mu, mu)) <= 1e-14);
    }
    const auto mu0 = two_point(0.0, 0.5, 1.0, 0.5);
    const auto mu = two_point(0.0, 0.25, 1.0, 0.75);
    const auto nu = two_point(0.0, 0.75, 1.0, 0.25);
    CHECK(bregman(LossKind(LossTag::non_saturating_kl, mu0), nu, mu) ==
          doctest::Approx(0.127706405941498).epsilon(1e-12));
    CHECK(bregman(LossKind(LossTag::minimax_js, mu0), mu, mu) == doctest::Approx(0.0));
    CHECK(bregman(LossKind(LossTag::wasserstein1, mu0), nu, mu) >= -1e-12);
}

TEST_CASE("bregman KR-quadratic bound") {
    const KernelSpec k = KernelSpec::critical();
    Rng rng(32);
    std::vector<MeasurePair> pairs;
    for (int t = 0; t < 200; ++t)
        pairs.push_back({random_measure(rng, BoxDomain::unit(1)), random_measure(rng, BoxDomain::unit(1))});
    pairs.push_back({dirac(0.2), dirac(0.2)});
    const auto r = bregman_kr_bound_check(LossKind::mmd(dirac(0.0), k), pairs, 2.0 * kPi);
    CHECK(r.within_bound);
    CHECK(r.worst_ratio <= 2.0 * kPi);
    CHECK(r.excluded == 1);
    CHECK(r.used == 200);

    const auto mu0 = two_point(0.0, 0.5, 1.0, 0.5);
    std::vector<MeasurePair> off{{two_point(0.0, 0.5, 1.0, 0.5), dirac(0.0)}};
    const auto js = bregman_kr_bound_check(LossKind(LossTag::minimax_js, mu0), off, 2.0 * kPi);
    CHECK(js.unbounded);
    CHECK_FALSE(js.within_bound);
}

TEST_CASE("kernel cross-Hessian norm") {
    const KernelSpec k = KernelSpec::critical();
    CHECK(kernel_cross_hessian_norm(k, Vec::Zero(1), Vec::Zero(1)) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
    CHECK(kernel_cross_hessian_norm(k, Vec::Zero(2), Vec::Constant(2, 6.0)) <= 1e-40 * 2.0 * kPi);
    // z = r^2 / (2 sigma^2) = 1 means r^2 = 1/pi.
    Vec y(2);
    y << std::sqrt(1.0 / kPi), 0.0;
    CHECK(kernel_cross_hessian_norm(k, Vec::Zero(2), y) == doctest::Approx(2.31145469958184).epsilon(1e-14));
}

TEST_CASE("smoothness report JSON") {
    const auto r = smoothness_report(LossTag::mmd_sq_half, 1, 20, 5);
    const std::string j = to_json(r);
    CHECK(j.find("\"alpha_hat\"") != std::string::npos);
    CHECK(j.find("\"beta2_hat\"") != std::string::npos);
    CHECK(r.alpha.value <= kAlphaBound);
}
