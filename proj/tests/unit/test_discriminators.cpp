#include "gansmooth/discriminators.hpp"

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
Vec at(double x) { return Vec::Constant(1, x); }
}  // namespace

TEST_CASE("phi_mmd and its gradient") {
    const KernelSpec k = KernelSpec::critical();
    const auto d0 = dirac(0.0), d1 = dirac(1.0);
    CHECK(phi_mmd(d0, d0, k, at(0.3)) == 0.0);
    CHECK(phi_mmd(d1, d0, k, at(0.0)) == doctest::Approx(-0.956786081736228).epsilon(1e-14));
    CHECK(phi_mmd(d1, d0, k, at(0.5)) == doctest::Approx(0.0));
    CHECK(grad_phi_mmd(d0, d0, k, at(0.2)).norm() == 0.0);
    CHECK(grad_phi_mmd(d1, d0, k, at(0.5))[0] == doctest::Approx(2.86474374536228).epsilon(1e-13));
}

TEST_CASE("grad_phi_mmd matches central differences") {
    const KernelSpec k = KernelSpec::critical();
    Rng rng(21);
    for (int t = 0; t < 30; ++t) {
        const int d = 1 + t % 2;
        const auto mu = random_measure(rng, BoxDomain::unit(d));
        const auto mu0 = random_measure(rng, BoxDomain::unit(d));
        Vec x(d);
        for (int a = 0; a < d; ++a) x[a] = rng.uniform(-1, 1);
        const Vec g = grad_phi_mmd(mu, mu0, k, x);
        for (int a = 0; a < d; ++a) {
            Vec p = x, m = x;
            p[a] += 1e-4;
            m[a] -= 1e-4;
            CHECK(std::abs((phi_mmd(mu, mu0, k, p) - phi_mmd(mu, mu0, k, m)) / 2e-4 - g[a]) <= 1e-6);
        }
    }
}

TEST_CASE("MMD discriminator pairing reproduces MMD^2") {
    const KernelSpec k = KernelSpec::critical();
    Rng rng(22);
    for (int t = 0; t < 30; ++t) {
        const auto mu = random_measure(rng, BoxDomain::unit(2));
        const auto mu0 = random_measure(rng, BoxDomain::unit(2));
        const SignedMeasure xi = diff(mu, mu0);
        double pairing = 0.0;
        for (int i = 0; i < xi.size(); ++i)
            pairing += xi.weights()[i] * phi_mmd(mu, mu0, k, xi.points().row(i).transpose());
        CHECK(std::abs(pairing - mmd_sq(mu, mu0, k)) <= 1e-10);
    }
}

TEST_CASE("MMD discriminator gradient stays below the analytic alpha") {
    const KernelSpec k = KernelSpec::critical();
    const double bound = 2.0 * std::sqrt(2.0 * kPi) * std::exp(-0.5);
    Rng rng(23);
    for (int t = 0; t < 50; ++t) {
        const auto mu = random_measure(rng, BoxDomain::unit(1));
        const auto mu0 = random_measure(rng, BoxDomain::unit(1));
        for (int i = 0; i <= 100; ++i) CHECK(grad_phi_mmd(mu, mu0, k, at(-1.0 + 0.02 * i)).norm() <= bound);
    }
}

TEST_CASE("density-ratio discriminators") {
    const auto mu = two_point(0.0, 0.75, 1.0, 0.25);
    const auto mu0 = two_point(0.0, 0.25, 1.0, 0.75);
    CHECK(phi_minimax(mu0, mu0, at(1.0)) == doctest::Approx(-0.346573590279973));
    CHECK(phi_minimax(dirac(0.0), dirac(0.0), at(0.0)) == doctest::Approx(0.5 * std::log(0.5)));
    CHECK(phi_minimax(mu, mu0, at(0.0)) == doctest::Approx(-0.143841036225890));
    CHECK(phi_ns(mu0, mu0, at(0.0)) == doctest::Approx(0.346573590279973));
    CHECK(phi_ns(mu, mu0, at(0.0)) == doctest::Approx(0.693147180559945));
    CHECK(std::isinf(phi_ns(dirac(0.5), dirac(0.0), at(0.5))));
    CHECK(phi_minimax(dirac(0.5), dirac(0.0), at(0.0)) == -kInf);
    try {
        phi_minimax(mu, mu0, at(0.5));
        FAIL("expected PointOffSupport");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PointOffSupport);
    }
}

TEST_CASE("Kantorovich potential in 1-D") {
    const auto sym = two_point(-1.0, 0.5, 1.0, 0.5);
    for (int i = 0; i <= 40; ++i) {
        const double x = -1.0 + 0.05 * i;
        CHECK(phi_w1_1d(sym, dirac(0.0), x) == doctest::Approx(std::abs(x)).epsilon(1e-14));
        CHECK(phi_w1_1d(sym, sym, x) == 0.0);
    }
    for (int i = 0; i <= 20; ++i) CHECK(phi_w1_1d(dirac(1.0), dirac(0.0), 0.05 * i) == doctest::Approx(0.05 * i));
    CHECK_THROWS_AS(KantorovichPotential1D(dirac(Vec::Zero(2)), dirac(Vec::Zero(2))), Error);
}

TEST_CASE("Kantorovich potential attains W1 and is 1-Lipschitz") {
    Rng rng(24);
    for (int t = 0; t < 50; ++t) {
        const auto mu = random_measure(rng, BoxDomain::unit(1));
        const auto mu0 = random_measure(rng, BoxDomain::unit(1));
        const KantorovichPotential1D psi(mu, mu0);
        CHECK(psi(0.0) == 0.0);
        const SignedMeasure xi = diff(mu, mu0);
        double pairing = 0.0;
        for (int i = 0; i < xi.size(); ++i) pairing += xi.weights()[i] * psi(xi.points()(i, 0));
        CHECK(std::abs(pairing - w1_1d(mu, mu0)) <= 1e-9);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double x = -1.0 + 0.01 * i;
            worst = std::max(worst, std::abs(psi(x + 0.01) - psi(x)) / 0.01);
        }
        CHECK(worst <= 1.0 + 1e-9);
    }
}

TEST_CASE("DiscOracle dispatch") {
    const KernelSpec k = KernelSpec::critical();
    const DiscOracle mmd(LossKind::mmd(dirac(0.0), k), dirac(1.0));
    CHECK(mmd.supports_gradient());
    CHECK(mmd.value(at(0.0)) == doctest::Approx(-0.956786081736228));
    const DiscOracle js(LossKind(LossTag::minimax_js, dirac(0.0)), dirac(1.0));
    CHECK_FALSE(js.supports_gradient());
    try {
        js.grad(at(0.0));
        FAIL("expected GradientUnsupported");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GradientUnsupported);
    }
    CHECK_THROWS_AS(DiscOracle(LossKind(LossTag::wasserstein1, dirac(Vec::Zero(2))), dirac(Vec::Zero(2))), Error);
}
