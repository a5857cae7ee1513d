#include "gansmooth/envelopes.hpp"

#include <doctest.h>

#include <sstream>

using namespace gansmooth;

namespace {
BoxDomain line(double a) { return BoxDomain(Vec::Constant(1, -a), Vec::Constant(1, a)); }
double huber(double x) { return std::abs(x) <= 1.0 ? 0.5 * x * x : std::abs(x) - 0.5; }
GridFn sample1(double a, double h, double (*f)(double)) {
    return GridFn::sample(line(a), h, [f](const Vec& x) { return f(x[0]); });
}
double at(const GridFn& g, double x) {
    const int i = static_cast<int>(std::lround((x - g.domain().lo[0]) / g.step()));
    return g[i];
}
double abs1(double x) { return std::abs(x); }
double half_sq(double x) { return 0.5 * x * x; }
double origin_indicator(double x) { return std::abs(x) < 1e-12 ? 0.0 : kInf; }
}  // namespace

TEST_CASE("inf_conv closed forms") {
    const auto f = sample1(3, 1e-2, abs1);
    const auto g = sample1(3, 1e-2, half_sq);
    const auto h = inf_conv(f, g);
    CHECK(at(h, 0.0) == doctest::Approx(0.0));
    CHECK(at(h, 2.0) == doctest::Approx(1.5).epsilon(1e-12));
    const auto id = inf_conv(f, sample1(3, 1e-2, origin_indicator));
    CHECK((id.values() - f.values()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("inf_conv is commutative and associative") {
    Rng rng(41);
    for (int t = 0; t < 10; ++t) {
        // Convex pieces, +inf outside [-1, 1] so sums stay on the [-3, 3] lattice.
        auto make = [&](void) {
            const double a = rng.uniform(0.1, 2.0), c = rng.uniform(-0.5, 0.5), b = rng.uniform(0.0, 1.0);
            return GridFn::sample(line(3), 0.05, [=](const Vec& x) {
                return std::abs(x[0]) > 1.0 + 1e-9 ? kInf : a * (x[0] - c) * (x[0] - c) + b * std::abs(x[0]);
            });
        };
        const auto f = make(), g = make(), h = make();
        const auto fg = inf_conv(f, g), gf = inf_conv(g, f);
        for (int i = 0; i < fg.size(); ++i) CHECK(fg[i] == gf[i]);
        const auto left = inf_conv(fg, h), right = inf_conv(f, inf_conv(g, h));
        for (int i = 0; i < left.size(); ++i) {
            if (std::isinf(left[i]) || std::isinf(right[i])) CHECK(left[i] == right[i]);
            else CHECK(std::abs(left[i] - right[i]) <= 1e-12);
        }
    }
}

TEST_CASE("inf_conv rejects mismatched grids") {
    const auto f = sample1(1, 0.1, abs1);
    const auto g = sample1(2, 0.1, abs1);
    try {
        inf_conv(f, g);
        FAIL("expected GridMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GridMismatch);
    }
    CHECK_THROWS_AS(GridFn::sample(line(1), 0.3, [](const Vec&) { return 0.0; }), Error);
}

TEST_CASE("Pasch-Hausdorff envelope") {
    const double h = 1e-3;
    const auto ph = pasch_hausdorff(sample1(3, h, half_sq), 1.0);
    double worst = 0.0;
    for (int i = 0; i < ph.size(); ++i) worst = std::max(worst, std::abs(ph[i] - huber(ph.node(i)[0])));
    CHECK(worst <= 2e-3);
    CHECK(max_slope(ph) <= 1.0 + 2 * h);

    const auto lip = sample1(1, 0.01, [](double x) { return 0.5 * std::sin(x); });
    CHECK((pasch_hausdorff(lip, 1.0).values() - lip.values()).cwiseAbs().maxCoeff() <= 1e-12);

    const auto cone = pasch_hausdorff(sample1(1, 0.01, origin_indicator), 1.0);
    for (int i = 0; i < cone.size(); ++i) CHECK(cone[i] == doctest::Approx(std::abs(cone.node(i)[0])).epsilon(1e-12));

    const auto rough = sample1(1, 0.01, [](double x) { return 3.0 * x * x + (x > 0.2 ? 1.0 : 0.0); });
    const auto lo = pasch_hausdorff(rough, 0.5), hi = pasch_hausdorff(rough, 2.0);
    for (int i = 0; i < lo.size(); ++i) CHECK(lo[i] <= hi[i]);
    CHECK_THROWS_AS(pasch_hausdorff(rough, 0.0), Error);
}

TEST_CASE("Moreau envelope") {
    const auto m = moreau(sample1(3, 1e-3, abs1), 1.0);
    double worst = 0.0;
    for (int i = 0; i < m.size(); ++i) worst = std::max(worst, std::abs(m[i] - huber(m.node(i)[0])));
    CHECK(worst <= 2e-3);
    CHECK(max_second_difference(m) <= 1.0 + 1e-3);

    const auto q = moreau(sample1(1, 0.01, half_sq), 1.0);
    for (int i = 0; i < q.size(); ++i) {
        const double x = q.node(i)[0];
        // The minimizer x/2 is a node only on every other index.
        CHECK(std::abs(q[i] - 0.25 * x * x) <= 0.25 * 0.01 * 0.01 + 1e-15);
    }
    const auto c = moreau(sample1(1, 0.01, [](double) { return 2.5; }), 3.0);
    CHECK((c.values().array() - 2.5).abs().maxCoeff() <= 1e-15);

    const auto rough = sample1(1, 0.01, [](double x) { return std::abs(x - 0.3) + x * x; });
    const auto r = moreau(rough, 2.0);
    for (int i = 0; i < r.size(); ++i) CHECK(r[i] <= rough[i]);
    CHECK(r.values().minCoeff() == doctest::Approx(rough.values().minCoeff()));
    CHECK_THROWS_AS(moreau(rough, -1.0), Error);
}

TEST_CASE("Legendre conjugates") {
    const auto sq = legendre(sample1(2, 0.01, half_sq));
    for (int i = 0; i < sq.size(); ++i) {
        const double z = sq.node(i)[0];
        if (std::abs(z) < 1.9) CHECK(sq[i] == doctest::Approx(0.5 * z * z).epsilon(1e-12));
    }
    const auto ab = legendre(sample1(2, 0.01, abs1));
    for (int i = 0; i < ab.size(); ++i) {
        const double z = ab.node(i)[0];
        if (std::abs(z) <= 1.0 - 1e-9) CHECK(ab[i] == doctest::Approx(0.0));
        if (std::abs(z) >= 1.0 + 1e-9) CHECK(std::isinf(ab[i]));
    }
    const auto lin = legendre(sample1(1, 0.01, [](double x) { return 0.3 * x; }));
    for (int i = 0; i < lin.size(); ++i) {
        const double z = lin.node(i)[0];
        if (std::abs(z - 0.3) < 1e-9) CHECK(lin[i] == doctest::Approx(0.0));
        else CHECK(std::isinf(lin[i]));
    }
}

TEST_CASE("double conjugate is the convex hull") {
    // Double well: its hull is flat between the two minima.
    const auto f = sample1(1, 0.01, [](double x) { return (x * x - 0.25) * (x * x - 0.25); });
    // The dual box must cover the slopes of f, which reach 3 at the ends.
    const BoxDomain wide = line(4);
    const auto bi = legendre(legendre(f, wide), line(1));
    for (int i = 0; i < bi.size(); ++i) {
        const double x = bi.node(i)[0];
        if (std::abs(x) > 0.9) continue;
        const double fx = (x * x - 0.25) * (x * x - 0.25);
        const double hull = std::abs(x) <= 0.5 ? 0.0 : fx;
        CHECK(std::abs(bi[i] - hull) <= 2e-2);
        CHECK(bi[i] <= fx + 1e-12);
    }
}

TEST_CASE("conjugate-sum identity") {
    const double h = 0.01;
    const auto ab = sample1(2, h, abs1), sq = sample1(2, h, half_sq);
    CHECK(conjugate_sum_identity_check(ab, sq) <= 2 * h);
    CHECK(conjugate_sum_identity_check(ab, sample1(2, h, origin_indicator)) == 0.0);
    CHECK(conjugate_sum_identity_check(sq, sq) <= 2 * h);
}

TEST_CASE("minimizer invariance") {
    const auto f = sample1(1, 0.01, [](double x) { return (x - 0.3) * (x - 0.3); });
    CHECK(minimizer_invariance_check(f, sample1(1, 0.01, abs1)));
    CHECK(minimizer_invariance_check(f, sample1(1, 0.01, origin_indicator)));
    CHECK(minimizer_invariance_check(sample1(1, 0.01, [](double x) { return std::abs(x) + 1.0; }),
                                     sample1(1, 0.01, half_sq)));
    try {
        minimizer_invariance_check(f, sample1(1, 0.01, [](double x) { return x * x + 1.0; }));
        FAIL("expected PreconditionViolated");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PreconditionViolated);
    }
}

TEST_CASE("2-D envelopes") {
    const BoxDomain box = BoxDomain::unit(2);
    const auto f = GridFn::sample(box, 0.1, [](const Vec& x) { return x.norm(); });
    const auto g = GridFn::sample(box, 0.1, [](const Vec& x) { return 0.5 * x.squaredNorm(); });
    const auto fg = inf_conv(f, g), gf = inf_conv(g, f);
    CHECK((fg.values() - gf.values()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(fg[fg.flat(10, 10)] == 0.0);
    CHECK(minimizer_invariance_check(f, g));
}

TEST_CASE("grid CSV round trip") {
    const auto f = sample1(1, 0.25, origin_indicator);
    std::stringstream ss;
    write_gridfn_csv(ss, f);
    CHECK(ss.str().find("inf") != std::string::npos);
    const auto back = read_gridfn_csv(ss);
    CHECK(back.same_grid(f));
    for (int i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);

    const auto g = GridFn::sample(BoxDomain::unit(2), 0.5, [](const Vec& x) { return x[0] - 2 * x[1]; });
    std::stringstream s2;
    write_gridfn_csv(s2, g);
    const auto g2 = read_gridfn_csv(s2);
    CHECK((g2.values() - g.values()).cwiseAbs().maxCoeff() == 0.0);
}
