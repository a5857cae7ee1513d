#include "gansmooth/divergences.hpp"
#include "gansmooth/rkhs.hpp"

#include <doctest.h>

using namespace gansmooth;

namespace {
EmbeddingFn single() { return EmbeddingFn{Vec::Zero(1), Vec::Ones(1), KernelSpec::critical()}; }
}  // namespace

TEST_CASE("series norm of a single kernel section") {
    const auto s = truncated_series_norm(single(), 20);
    REQUIRE(s.size() == 21);
    CHECK(s[0] == doctest::Approx(0.707106781186548).epsilon(1e-9));
    for (std::size_t k = 1; k < s.size(); ++k) CHECK(s[k] >= s[k - 1]);
    CHECK(std::abs(s[20] - 1.0) <= 1e-6);
}

TEST_CASE("series norm of a two-atom signed embedding") {
    Vec c(2), w(2);
    c << 0.0, 0.5;
    w << 1.0, -1.0;
    const EmbeddingFn f{c, w, KernelSpec::critical()};
    // 2 - 2 exp(-pi / 4)
    CHECK(f.norm_sq() == doctest::Approx(1.08812374446801).epsilon(1e-13));
    const auto s = truncated_series_norm(f, 25);
    CHECK(std::abs(s.back() - f.norm_sq()) <= 1e-6);
}

TEST_CASE("series norm preconditions") {
    CHECK_THROWS_AS(truncated_series_norm(single(), kMaxSeriesOrder + 1), Error);
    try {
        truncated_series_norm(EmbeddingFn{Vec::Zero(1), Vec::Ones(1), KernelSpec(1.0)}, 5);
        FAIL("expected PreconditionViolated");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PreconditionViolated);
    }
    try {
        truncated_series_norm(single(), 10, QuadratureGrid{-0.5, 0.5, 1e-3});
        FAIL("expected QuadratureDomainTooSmall");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::QuadratureDomainTooSmall);
    }
}

TEST_CASE("embedding derivatives match finite differences") {
    Vec c(3), w(3);
    c << -0.4, 0.1, 0.7;
    w << 0.5, -1.2, 0.3;
    const EmbeddingFn f{c, w, KernelSpec::critical()};
    for (double x : {-1.0, -0.2, 0.35, 1.3}) {
        const double e = 1e-5;
        CHECK(f.derivative(0, x) == doctest::Approx(f(x)).epsilon(1e-14));
        CHECK(f.derivative(1, x) == doctest::Approx((f(x + e) - f(x - e)) / (2 * e)).epsilon(1e-7));
        CHECK(f.derivative(2, x) ==
              doctest::Approx((f.derivative(1, x + e) - f.derivative(1, x - e)) / (2 * e)).epsilon(1e-6));
    }
}

TEST_CASE("embedding norm equals squared MMD") {
    const KernelSpec k = KernelSpec::critical();
    Rng rng(51);
    for (int t = 0; t < 20; ++t) {
        const auto mu = random_measure(rng, BoxDomain::unit(1));
        const auto nu = random_measure(rng, BoxDomain::unit(1));
        CHECK(std::abs(embedding_norm_sq(diff(mu, nu), k) - mmd_sq(mu, nu, k)) <= 1e-13);
        CHECK(std::abs(embed(diff(mu, nu)).norm_sq() - mmd_sq(mu, nu, k)) <= 1e-13);
    }
}

TEST_CASE("gradient penalty") {
    Vec v(1), w(1);
    v << 1.0;
    w << 1.0;
    CHECK(gp_penalty(v, Mat::Zero(1, 1), w) == doctest::Approx(1.0));
    CHECK(gp_penalty(v, Mat::Constant(1, 1, std::sqrt(4.0 * kPi)), w) == doctest::Approx(2.0));
    Vec v2(2), w2(2);
    v2 << 0.5, -1.0;
    w2 << 0.25, 0.75;
    Mat g(2, 2);
    g << 1.0, 0.0, 0.0, 2.0;
    CHECK(gp_penalty(v2, g, w2) == doctest::Approx(0.25 * (0.25 + 1.0 / (4 * kPi)) + 0.75 * (1.0 + 4.0 / (4 * kPi))));
    CHECK_THROWS_AS(gp_penalty(v2, g, w), Error);
    w2[0] = -0.1;
    CHECK_THROWS_AS(gp_penalty(v2, g, w2), Error);
}
