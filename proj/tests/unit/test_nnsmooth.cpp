#include "gansmooth/nnsmooth.hpp"

#include <doctest.h>

using namespace gansmooth;

TEST_CASE("activation names") {
    CHECK(parse_activation("elu") == Activation::elu);
    CHECK(to_string(Activation::sigmoid) == "sigmoid");
    CHECK_THROWS_AS(parse_activation("tanh"), Error);
}

TEST_CASE("spectral normalization bounds every layer") {
    for (int depth = 1; depth <= 4; ++depth) {
        const MlpNet raw = make_mlp(2, 8, depth, Activation::elu, 1.0, 60 + depth, false);
        const MlpNet net = spectral_normalize(raw, 3);
        CHECK(max_layer_norm(net) <= 1.0 + 1e-6);
        CHECK(max_layer_norm(net) >= 1.0 - 1e-4);
    }
}

TEST_CASE("zero layers are left alone") {
    MlpNet net = make_mlp(2, 4, 2, Activation::elu, 1.0, 5, false);
    net.layers[0].weight.setZero();
    const MlpNet out = spectral_normalize(net, 1);
    CHECK(out.layers[0].weight.isZero());
    CHECK(zero_layers(out) == std::vector<int>{0});
    CHECK(max_layer_norm(out) <= 1.0 + 1e-6);
}

TEST_CASE("normalized networks satisfy Lipschitz and smoothness bounds") {
    const BoxDomain box = BoxDomain::unit(2);
    for (int depth = 1; depth <= 5; ++depth) {
        const MlpNet net = make_mlp(2, 16, depth, Activation::elu, 1.0, 70 + depth);
        CHECK(empirical_lipschitz(net, box, 500, 1) <= 1.0 + 1e-3);
        CHECK(empirical_smoothness(net, box, 500, 2) <= depth * (1.0 + 1e-3));
    }
    const MlpNet scaled = make_mlp(2, 16, 3, Activation::sigmoid, 2.0, 80);
    CHECK(empirical_lipschitz(scaled, box, 500, 3) <= 2.0 * (1.0 + 1e-3));
    const MlpNet relu = make_mlp(2, 8, 2, Activation::relu, 1.0, 81);
    try {
        empirical_smoothness(relu, box, 10, 4);
        FAIL("expected NonSmoothActivation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonSmoothActivation);
    }
}

TEST_CASE("input gradient matches finite differences") {
    for (Activation act : {Activation::elu, Activation::sigmoid}) {
        const MlpNet net = make_mlp(3, 6, 3, act, 1.7, 90, false);
        Vec x(3);
        x << 0.3, -0.6, 0.1;
        const Vec g = mlp_input_grad(net, x);
        for (int a = 0; a < 3; ++a) {
            Vec xp = x, xm = x;
            xp[a] += 1e-5;
            xm[a] -= 1e-5;
            CHECK(std::abs((mlp_forward(net, xp) - mlp_forward(net, xm)) / 2e-5 - g[a]) <= 1e-6);
        }
    }
}

TEST_CASE("power iteration") {
    Mat d = Mat::Zero(3, 3);
    d.diagonal() << 3.0, 1.0, 0.5;
    CHECK(power_iteration_specnorm(d, 100, 1) == doctest::Approx(3.0).epsilon(1e-10));
    const auto z = power_iteration(Mat::Zero(2, 2), 10, 1);
    CHECK(z.zero);
    CHECK(z.estimate == 0.0);
    // Warm starts continue the same sequence.
    const Mat w = (Mat(2, 2) << 1.0, 2.0, 0.5, -1.0).finished();
    const auto a = power_iteration(w, 3, 9);
    const auto b = power_iteration(w, 4, a);
    const auto c = power_iteration(w, 7, 9);
    CHECK(b.n_iters == 7);
    CHECK(b.estimate == doctest::Approx(c.estimate).epsilon(1e-14));
}

TEST_CASE("parameters and JSON round trip") {
    MlpNet net = make_mlp(2, 5, 3, Activation::sigmoid, 0.8, 11);
    CHECK(net.n_params() == 2 * 5 + 5 + 5 * 5 + 5 + 5 + 1);
    CHECK(net.input_dim() == 2);
    const Vec p = net.params();
    MlpNet copy = net;
    copy.set_params(p * 2.0);
    CHECK(copy.layers[1].weight(0, 1) == 2.0 * net.layers[1].weight(0, 1));
    CHECK_THROWS_AS(copy.set_params(Vec::Zero(3)), Error);

    const MlpNet back = mlp_from_json(to_json(net));
    CHECK(back.activation == Activation::sigmoid);
    CHECK(back.final_scale == 0.8);
    CHECK((back.params() - p).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(mlp_from_json("{\"layers\": 3}"), Error);

    MlpNet bad = net;
    bad.layers[1].weight = Mat::Zero(4, 4);
    CHECK_THROWS_AS(bad.validate(), Error);
}
