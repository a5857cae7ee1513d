#include "gansmooth/trainer.hpp"

#include <doctest.h>

#include <sstream>

using namespace gansmooth;

TEST_CASE("theoretical learning rate") {
    const double a = 1.0 / 8.0;
    CHECK(theoretical_lr(a, 0.0, 1.0, 7.0, 2.0 * kPi) == doctest::Approx(4.81812144602153).epsilon(1e-13));
    CHECK(theoretical_lr(a, 0.0, 1.0, 4.0 * kPi, 2.0 * kPi) == doctest::Approx(3.39530545262710).epsilon(1e-13));
    // Doubling the particle count doubles the step.
    const double n64 = theoretical_lr(1.0 / 8.0, 0.0, 1.0, 4.0 * kPi, 2.0 * kPi);
    const double n128 = theoretical_lr(1.0 / std::sqrt(128.0), 0.0, 1.0, 4.0 * kPi, 2.0 * kPi);
    CHECK(n128 == doctest::Approx(2.0 * n64).epsilon(1e-13));
    CHECK(theoretical_lr(0.5, 1.0, 1.0, 1.0, 1.0) == doctest::Approx(1.0 / 1.5));
    try {
        theoretical_lr(0.0, 0.0, 1.0, 1.0, 1.0);
        FAIL("expected DegenerateConstants");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateConstants);
    }
}

TEST_CASE("particle loss and gradient") {
    const KernelSpec k = KernelSpec::critical();
    const ParticleGenerator one{Mat::Constant(1, 1, 1.0)};
    CHECK(mmd_particle_grad(one, dirac(0.0), k)(0, 0) == doctest::Approx(0.271521056300593).epsilon(1e-13));
    CHECK(mmd_particle_loss(one, dirac(0.0), k) == doctest::Approx(1.0 - std::exp(-kPi)).epsilon(1e-13));

    Mat pts(3, 2);
    pts << 0.1, 0.2, -0.5, 0.4, 0.3, -0.7;
    const ParticleGenerator at_target{pts};
    const auto target = make_uniform(pts);
    CHECK(mmd_particle_grad(at_target, target, k).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(mmd_particle_loss(at_target, target, k) <= 1e-15);
    CHECK(one.lipschitz_a() == 1.0);
}

TEST_CASE("particle gradient matches finite differences") {
    const KernelSpec k = KernelSpec::critical();
    Rng rng(61);
    const auto target = random_measure(rng, BoxDomain::unit(2));
    Mat th(4, 2);
    for (Eigen::Index i = 0; i < th.size(); ++i) th.data()[i] = rng.uniform(-1.0, 1.0);
    const Mat g = mmd_particle_grad(ParticleGenerator{th}, target, k);
    const double e = 1e-6;
    for (Eigen::Index i = 0; i < th.size(); ++i) {
        Mat p = th, m = th;
        p.data()[i] += e;
        m.data()[i] -= e;
        const double fd =
            (mmd_particle_loss(ParticleGenerator{p}, target, k) - mmd_particle_loss(ParticleGenerator{m}, target, k)) /
            (2 * e);
        CHECK(std::abs(fd - g.data()[i]) <= 1e-8);
    }
}

TEST_CASE("flag strings") {
    CHECK(flags_to_string(0) == "none");
    CHECK(flags_to_string(flags::clamped) == "clamped");
    CHECK(flags_to_string(flags::clamped | flags::diverged) == "clamped|diverged");
    CHECK(parse_flags("clamped|diverged") == (flags::clamped | flags::diverged));
    CHECK(parse_flags("none") == 0u);
    CHECK_THROWS_AS(parse_flags("exploded"), Error);
}

TEST_CASE("particle descent at the theoretical step") {
    TrainConfig cfg;
    cfg.target = sample_target(TargetKind::ring, 16, 5, 2);
    cfg.n_particles = 16;
    cfg.n_steps = 200;
    cfg.seed = 6;
    const TrainTrace tr = train_particles(cfg);
    REQUIRE(tr.steps.size() == 200);
    CHECK(tr.lipschitz_l == doctest::Approx(6.0 * kPi / 16.0));
    CHECK(tr.realizable);
    CHECK_FALSE(tr.diverged);
    CHECK(descent_violation(tr, tr.lipschitz_l) <= 1e-9);
    CHECK(check_stationarity_bound(tr, tr.lipschitz_l, tr.bound_reference()));
    CHECK(tr.final_loss <= tr.initial_loss());
    CHECK(tr.nonmonotone_fraction() == 0.0);

    const TrainTrace again = train_particles(cfg);
    CHECK(again.final_loss == tr.final_loss);
}

TEST_CASE("synthetic trace violating the bound") {
    TrainTrace tr;
    for (int k = 0; k < 10; ++k) tr.steps.push_back({k, 1.0, 5.0, 0.1, 0});
    tr.final_loss = 1.0;
    const auto r = stationarity_bound(tr, 1.0, 1.0);
    CHECK_FALSE(r.holds);
    CHECK(r.worst_ratio == doctest::Approx(12.5 * 10));
    CHECK(r.worst_n == 10);
    CHECK(descent_violation(tr, 1.0) == doctest::Approx(12.5));
}

TEST_CASE("trace CSV round trip") {
    TrainTrace tr;
    tr.steps.push_back({0, 0.5, 0.25, 0.125, flags::clamped});
    tr.steps.push_back({1, 0.4, 0.1234567890123, 0.125, 0});
    std::stringstream ss;
    write_trace_csv(ss, tr);
    CHECK(ss.str().rfind("step,loss,grad_norm,step_size,flags", 0) == 0);
    const TrainTrace back = read_trace_csv(ss);
    REQUIRE(back.steps.size() == 2);
    CHECK(back.steps[0].flags == flags::clamped);
    CHECK(back.steps[1].grad_norm == tr.steps[1].grad_norm);

    std::stringstream empty("step,loss,grad_norm,step_size,flags\n");
    try {
        read_trace_csv(empty);
        FAIL("expected MalformedInput");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedInput);
    }
}

TEST_CASE("gan2d configuration") {
    const GanLoopConfig cfg = gan_config_from_json(R"({"seed": 3, "n_steps": 4, "target": "gaussian_mixture"})");
    CHECK(cfg.n_steps == 4);
    CHECK(cfg.disc_depth == 3);
    CHECK(cfg.target.size() == 16);
    const GanLoopConfig back = gan_config_from_json(to_json(cfg));
    CHECK(back.seed == 3);
    CHECK(back.beta2 == cfg.beta2);
    try {
        gan_config_from_json(R"({"activation": "relu"})");
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
    }
    CHECK_THROWS_AS(gan_config_from_json("not json"), Error);
}

TEST_CASE("short gan2d run") {
    GanLoopConfig cfg;
    cfg.seed = 4;
    cfg.n_particles = 8;
    cfg.target = sample_target(TargetKind::ring, 8, 4, 2);
    cfg.disc_width = 8;
    cfg.n_steps = 5;
    const TrainTrace tr = train_gan2d(cfg);
    CHECK(tr.steps.size() == 5);
    REQUIRE_FALSE(tr.disc_norms.empty());
    for (double n : tr.disc_norms) CHECK(n <= 1.0 + 1e-6);
}

TEST_CASE("learning-rate sweep") {
    const auto rows = lr_sweep({1.0, 4.0}, 2, 9, TargetKind::ring, 8, 20);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].ratio == 1.0);
    CHECK(rows[3].ratio == 4.0);
    CHECK(rows[0].seed != rows[1].seed);
    std::stringstream ss;
    write_sweep_csv(ss, rows);
    CHECK(ss.str().rfind("ratio,seed,min_grad_norm,final_loss,diverged", 0) == 0);
}
