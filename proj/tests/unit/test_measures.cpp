#include "gansmooth/measures.hpp"

#include <doctest.h>

#include <sstream>

using namespace gansmooth;

namespace {
Mat col(std::initializer_list<double> v) {
    Mat m(v.size(), 1);
    int i = 0;
    for (double x : v) m(i++, 0) = x;
    return m;
}
Vec vec(std::initializer_list<double> v) {
    Vec out(v.size());
    int i = 0;
    for (double x : v) out[i++] = x;
    return out;
}
}  // namespace

TEST_CASE("make_discrete normalizes and merges duplicates") {
    const auto single = make_discrete(col({0.0}), vec({1.0}));
    CHECK(single.size() == 1);
    CHECK(single.weights()[0] == 1.0);

    const auto merged = make_discrete(col({0.0, 0.0}), vec({2.0, 2.0}));
    CHECK(merged.size() == 1);
    CHECK(merged.weights()[0] == doctest::Approx(1.0).epsilon(1e-15));

    const auto m = make_discrete(col({0.0, 1.0}), vec({1.0, 3.0}));
    CHECK(m.size() == 2);
    CHECK(m.weights()[0] == doctest::Approx(0.25));
    CHECK(m.weights()[1] == doctest::Approx(0.75));
}

TEST_CASE("make_discrete rejects bad input") {
    CHECK_THROWS_AS(make_discrete(Mat(0, 1), Vec(0)), Error);
    try {
        make_discrete(col({0.0, 1.0}), vec({1.0, -1.0}));
        FAIL("expected NegativeWeight");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NegativeWeight);
    }
    try {
        make_discrete(col({0.0, 1.0}), vec({1.0}));
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
    try {
        make_discrete(col({2.0}), vec({1.0}), BoxDomain::unit(1));
        FAIL("expected OutsideDomain");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OutsideDomain);
    }
}

TEST_CASE("make_discrete is idempotent") {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const auto m = random_measure(rng, BoxDomain::unit(1 + t % 2));
        const auto again = make_discrete(m.points(), m.weights(), m.domain());
        CHECK(again.points() == m.points());
        CHECK(again.weights() == m.weights());
    }
}

TEST_CASE("diff forms mass-zero signed measures") {
    const auto d0 = dirac(0.0), d1 = dirac(1.0);
    const auto z = diff(d0, d0);
    CHECK(z.mass_zero());
    CHECK(z.weights().cwiseAbs().maxCoeff() == 0.0);

    const auto x = diff(d1, d0);
    CHECK(x.mass_zero());
    CHECK(x.total_mass() == 0.0);
    CHECK(cdf_1d(x, 0.5) == doctest::Approx(-1.0));

    const auto half = make_discrete(col({0.0, 1.0}), vec({0.5, 0.5}));
    const auto h = diff(half, d0);
    CHECK(cdf_1d(h, 0.0) == doctest::Approx(-0.5));
    CHECK(cdf_1d(h, 1.0) == doctest::Approx(0.0));

    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto mu = random_measure(rng, BoxDomain::unit(1));
        const auto nu = random_measure(rng, BoxDomain::unit(1));
        const auto s = add(diff(mu, nu), diff(nu, mu));
        CHECK(s.weights().cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("cdf_1d") {
    const auto d0 = dirac(0.0);
    CHECK(cdf_1d(d0, -1.0) == 0.0);
    CHECK(cdf_1d(d0, 0.0) == 1.0);
    const auto half = make_discrete(col({0.0, 1.0}), vec({0.5, 0.5}));
    CHECK(cdf_1d(half, 0.5) == 0.5);
    CHECK_THROWS_AS(cdf_1d(dirac(Vec::Zero(2)), 0.0), Error);

    Rng rng(9);
    for (int t = 0; t < 20; ++t) {
        const auto m = random_measure(rng, BoxDomain::unit(1));
        double prev = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double c = cdf_1d(m, -1.0 + 0.02 * i);
            CHECK(c >= prev - 1e-15);
            prev = c;
        }
        CHECK(cdf_1d(m, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("sample_target") {
    const auto grid = sample_target(TargetKind::grid_uniform, 4, 1);
    CHECK(grid.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(grid.weights()[i] == doctest::Approx(0.25));

    const auto a = sample_target(TargetKind::ring, 8, 42);
    const auto b = sample_target(TargetKind::ring, 8, 42);
    CHECK(a.points() == b.points());
    CHECK(a.weights() == b.weights());

    const auto ring = sample_target(TargetKind::ring, 100, 3);
    for (int i = 0; i < ring.size(); ++i) CHECK(std::abs(ring.points().row(i).norm() - 0.5) <= 1e-9);

    const auto mix = sample_target(TargetKind::gaussian_mixture, 64, 3);
    for (int i = 0; i < mix.size(); ++i) CHECK(BoxDomain::unit(2).contains(mix.atom(i)));

    CHECK_THROWS_AS(parse_target_kind("spiral"), Error);
}

TEST_CASE("measure CSV round trip") {
    const auto m = make_discrete((Mat(2, 2) << 0.1, -0.2, 0.3, 0.4).finished(), vec({0.3, 0.7}));
    std::stringstream ss;
    write_measure_csv(ss, m);
    const auto back = read_measure_csv(ss);
    CHECK(back.points() == m.points());
    CHECK(back.weights() == m.weights());

    std::stringstream bad("x,y\n1,2\n");
    CHECK_THROWS_AS(read_measure_csv(bad), Error);
}
