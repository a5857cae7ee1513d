#include "gansmooth/trainer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace gansmooth {

namespace {

double kernel_rows(const KernelSpec& k, const Mat& p, Eigen::Index i, const Mat& q, Eigen::Index j) {
    return k.prefactor(static_cast<int>(p.cols())) *
           std::exp(-0.5 * (p.row(i) - q.row(j)).squaredNorm() * k.inv_sigma_sq());
}

void check_dims(const ParticleGenerator& gen, const DiscreteMeasure& mu0) {
    if (gen.n() == 0) throw Error(ErrorCode::EmptySupport, "generator has no particles");
    if (gen.dim() != mu0.dim()) throw Error(ErrorCode::DimensionMismatch, "particle and target dimension differ");
}

bool clamp_rows(Mat& theta, const BoxDomain& box) {
    bool moved = false;
    for (Eigen::Index i = 0; i < theta.rows(); ++i) {
        for (Eigen::Index a = 0; a < theta.cols(); ++a) {
            const double c = std::clamp(theta(i, a), box.lo[a], box.hi[a]);
            moved = moved || c != theta(i, a);
            theta(i, a) = c;
        }
    }
    return moved;
}

Mat uniform_in_box(Rng& rng, const BoxDomain& box, int n) {
    Mat theta(n, box.dim());
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < box.dim(); ++a) theta(i, a) = rng.uniform(box.lo[a], box.hi[a]);
    return theta;
}

int sample_index(Rng& rng, const Vec& weights) {
    double u = rng.uniform();
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        u -= weights[i];
        if (u < 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

}  // namespace

DiscreteMeasure ParticleGenerator::measure() const { return make_uniform(theta); }

double mmd_particle_loss(const ParticleGenerator& gen, const DiscreteMeasure& mu0, const KernelSpec& k) {
    check_dims(gen, mu0);
    const Mat& x = gen.theta;
    const Mat& y = mu0.points();
    const Vec& w = mu0.weights();
    const double inv_n = 1.0 / gen.n();
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.rows(); ++j) sxx += kernel_rows(k, x, i, x, j);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < y.rows(); ++j) sxy += w[j] * kernel_rows(k, x, i, y, j);
    for (Eigen::Index i = 0; i < y.rows(); ++i)
        for (Eigen::Index j = 0; j < y.rows(); ++j) syy += w[i] * w[j] * kernel_rows(k, y, i, y, j);
    return 0.5 * std::max(0.0, sxx * inv_n * inv_n - 2.0 * sxy * inv_n + syy);
}

Mat mmd_particle_grad(const ParticleGenerator& gen, const DiscreteMeasure& mu0, const KernelSpec& k) {
    check_dims(gen, mu0);
    const Mat& x = gen.theta;
    const Mat& y = mu0.points();
    const Vec& w = mu0.weights();
    const double inv_n = 1.0 / gen.n();
    const double s = k.inv_sigma_sq();
    Mat g = Mat::Zero(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.rows(); ++j) {
            if (i == j) continue;
            g.row(i) -= inv_n * s * kernel_rows(k, x, i, x, j) * (x.row(i) - x.row(j));
        }
        for (Eigen::Index j = 0; j < y.rows(); ++j)
            g.row(i) += w[j] * s * kernel_rows(k, x, i, y, j) * (x.row(i) - y.row(j));
    }
    return inv_n * g;
}

double theoretical_lr(double a, double b, double alpha, double beta1, double beta2) {
    const double l = alpha * b + a * a * (beta1 + beta2);
    if (!(l > 0.0) || !std::isfinite(l))
        throw Error(ErrorCode::DegenerateConstants, "smoothness constant L must be positive and finite");
    return 1.0 / l;
}

std::string flags_to_string(unsigned f) {
    std::string out;
    if (f & flags::clamped) out += "clamped";
    if (f & flags::diverged) out += out.empty() ? "diverged" : "|diverged";
    return out.empty() ? "none" : out;
}

unsigned parse_flags(const std::string& s) {
    unsigned f = 0;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, '|')) {
        if (tok == "clamped") f |= flags::clamped;
        else if (tok == "diverged") f |= flags::diverged;
        else if (tok != "none" && !tok.empty()) throw Error(ErrorCode::MalformedInput, "unknown flag '" + tok + "'");
    }
    return f;
}

double TrainTrace::min_grad_norm() const {
    double m = kInf;
    for (const auto& r : steps) m = std::min(m, r.grad_norm);
    return m;
}

double TrainTrace::nonmonotone_fraction() const {
    if (steps.empty()) return 0.0;
    int up = 0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const double next = k + 1 < steps.size() ? steps[k + 1].loss : final_loss;
        if (!(next <= steps[k].loss)) ++up;
    }
    return static_cast<double>(up) / steps.size();
}

double TrainTrace::bound_reference() const {
    const double j0 = initial_loss();
    if (realizable) return j0;
    double best = final_loss;
    for (const auto& r : steps) best = std::min(best, r.loss);
    return j0 - best;
}

TrainTrace train_particles(const TrainConfig& cfg) {
    if (!(cfg.lr_ratio > 0.0)) throw Error(ErrorCode::ConfigError, "lr_ratio must be positive");
    if (cfg.n_steps < 1) throw Error(ErrorCode::ConfigError, "n_steps must be at least 1");
    if (cfg.n_particles < 1) throw Error(ErrorCode::ConfigError, "particle count must be positive");

    const BoxDomain& box = cfg.target.domain();
    ParticleGenerator gen;
    TrainTrace trace;
    trace.realizable = cfg.target.size() == cfg.n_particles;
    if (cfg.init_at_target) {
        if (!trace.realizable) throw Error(ErrorCode::ConfigError, "init_at_target needs one particle per target atom");
        gen.theta = cfg.target.points();
    } else {
        Rng rng(derive_seed(cfg.seed, 0x696e6974));
        gen.theta = uniform_in_box(rng, box, cfg.n_particles);
    }

    const double a = gen.lipschitz_a();
    const double gamma0 = theoretical_lr(a, 0.0, 0.0, cfg.beta1_bound, cfg.beta2_bound);
    trace.lipschitz_l = 1.0 / gamma0;
    const double gamma = cfg.lr_ratio * gamma0;

    trace.steps.reserve(cfg.n_steps);
    for (int k = 0; k < cfg.n_steps; ++k) {
        StepRecord rec;
        rec.step = k;
        rec.loss = mmd_particle_loss(gen, cfg.target, cfg.kernel);
        const Mat g = mmd_particle_grad(gen, cfg.target, cfg.kernel);
        rec.grad_norm = g.norm();
        rec.step_size = gamma;
        if (!std::isfinite(rec.loss) || rec.loss > kDivergenceThreshold || !std::isfinite(rec.grad_norm)) {
            rec.flags |= flags::diverged;
            trace.diverged = true;
            trace.steps.push_back(rec);
            break;
        }
        gen.theta -= gamma * g;
        if (clamp_rows(gen.theta, box)) rec.flags |= flags::clamped;
        trace.steps.push_back(rec);
    }
    trace.final_loss = mmd_particle_loss(gen, cfg.target, cfg.kernel);
    if (!std::isfinite(trace.final_loss) || trace.final_loss > kDivergenceThreshold) trace.diverged = true;
    return trace;
}

StationarityCheck stationarity_bound(const TrainTrace& trace, double l, double j0) {
    StationarityCheck out;
    double best = kInf;
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        best = std::min(best, trace.steps[k].grad_norm * trace.steps[k].grad_norm);
        const double n = static_cast<double>(k + 1);
        const double bound = 2.0 * l / n * j0;
        const double ratio = bound > 0.0 ? best / bound : (best > 0.0 ? kInf : 0.0);
        if (ratio > out.worst_ratio) {
            out.worst_ratio = ratio;
            out.worst_n = static_cast<int>(k + 1);
        }
        if (best > bound * (1.0 + 1e-9)) out.holds = false;
    }
    return out;
}

bool check_stationarity_bound(const TrainTrace& trace, double l, double j0) {
    return stationarity_bound(trace, l, j0).holds;
}

double descent_violation(const TrainTrace& trace, double l) {
    double worst = -kInf;
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        const double next = k + 1 < trace.steps.size() ? trace.steps[k + 1].loss : trace.final_loss;
        const double g = trace.steps[k].grad_norm;
        worst = std::max(worst, next - (trace.steps[k].loss - g * g / (2.0 * l)));
    }
    return worst;
}

namespace {

double disc_objective(const MlpNet& net, const Mat& theta, const DiscreteMeasure& target, const Mat& penalty,
                      double beta2) {
    double e_mu = 0.0;
    for (Eigen::Index i = 0; i < theta.rows(); ++i) e_mu += mlp_forward(net, theta.row(i).transpose());
    e_mu /= static_cast<double>(theta.rows());
    double e_mu0 = 0.0;
    for (int j = 0; j < target.size(); ++j)
        e_mu0 += target.weights()[j] * mlp_forward(net, target.points().row(j).transpose());
    double pen = 0.0;
    for (Eigen::Index i = 0; i < penalty.rows(); ++i) {
        const Vec x = penalty.row(i).transpose();
        const double v = mlp_forward(net, x);
        pen += v * v + mlp_input_grad(net, x).squaredNorm() / (4.0 * kPi);
    }
    pen /= static_cast<double>(penalty.rows());
    return e_mu - e_mu0 - kPi / beta2 * pen;
}

Mat penalty_points(Rng& rng, const Mat& theta, const DiscreteMeasure& target, int m, bool interpolate) {
    Mat out(m, theta.cols());
    for (int s = 0; s < m; ++s) {
        const Eigen::Index u = rng.uniform_int(0, static_cast<int>(theta.rows()) - 1);
        const int v = sample_index(rng, target.weights());
        if (interpolate) {
            const double t = rng.uniform();
            out.row(s) = t * theta.row(u) + (1.0 - t) * target.points().row(v);
        } else {
            out.row(s) = s % 2 == 0 ? Eigen::RowVectorXd(theta.row(u)) : Eigen::RowVectorXd(target.points().row(v));
        }
    }
    return out;
}

}  // namespace

GanLoopConfig gan_config_from_json(const std::string& text) {
    GanLoopConfig cfg;
    try {
        const auto j = nlohmann::json::parse(text);
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.n_particles = j.value("n_particles", cfg.n_particles);
        cfg.init_at_target = j.value("init_at_target", cfg.init_at_target);
        cfg.disc_depth = j.value("disc_depth", cfg.disc_depth);
        cfg.disc_width = j.value("disc_width", cfg.disc_width);
        cfg.alpha = j.value("alpha", cfg.alpha);
        cfg.beta2 = j.value("beta2", cfg.beta2);
        cfg.disc_steps_per_gen = j.value("disc_steps_per_gen", cfg.disc_steps_per_gen);
        cfg.interpolation = j.value("interpolation", cfg.interpolation);
        cfg.penalty_samples = j.value("penalty_samples", cfg.penalty_samples);
        cfg.disc_lr = j.value("disc_lr", cfg.disc_lr);
        cfg.gen_lr = j.value("gen_lr", cfg.gen_lr);
        cfg.fd_step = j.value("fd_step", cfg.fd_step);
        cfg.n_steps = j.value("n_steps", cfg.n_steps);
        if (j.contains("activation") && j["activation"].get<std::string>() != "elu")
            throw Error(ErrorCode::ConfigError, "the discriminator activation must be elu");
        const std::string kind = j.value("target", std::string("ring"));
        if (j.contains("target_csv")) {
            cfg.target = read_measure_csv_file(j["target_csv"].get<std::string>());
        } else {
            cfg.target = sample_target(parse_target_kind(kind), cfg.n_particles, derive_seed(cfg.seed, 0x746172), 2);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("gan2d config: ") + e.what());
    }
    return cfg;
}

std::string to_json(const GanLoopConfig& cfg) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["n_particles"] = cfg.n_particles;
    j["init_at_target"] = cfg.init_at_target;
    j["disc_depth"] = cfg.disc_depth;
    j["disc_width"] = cfg.disc_width;
    j["activation"] = "elu";
    j["alpha"] = cfg.alpha;
    j["beta2"] = cfg.beta2;
    j["disc_steps_per_gen"] = cfg.disc_steps_per_gen;
    j["interpolation"] = cfg.interpolation;
    j["penalty_samples"] = cfg.penalty_samples;
    j["disc_lr"] = cfg.disc_lr;
    j["gen_lr"] = cfg.gen_lr;
    j["fd_step"] = cfg.fd_step;
    j["n_steps"] = cfg.n_steps;
    return j.dump(2);
}

TrainTrace train_gan2d(const GanLoopConfig& cfg) {
    if (cfg.disc_steps_per_gen < 1) throw Error(ErrorCode::ConfigError, "disc_steps_per_gen must be at least 1");
    if (cfg.n_steps < 1 || cfg.n_particles < 1) throw Error(ErrorCode::ConfigError, "steps and particles must be positive");
    if (!(cfg.alpha > 0.0) || !(cfg.beta2 > 0.0)) throw Error(ErrorCode::ConfigError, "alpha and beta2 must be positive");
    if (!(cfg.fd_step > 0.0) || !(cfg.disc_lr > 0.0)) throw Error(ErrorCode::ConfigError, "step sizes must be positive");
    const int d = cfg.target.dim();
    MlpNet net = make_mlp(d, cfg.disc_width, cfg.disc_depth, Activation::elu, cfg.alpha, derive_seed(cfg.seed, 0x646973));
    if (net.n_params() > kMaxDiscParams)
        throw Error(ErrorCode::ConfigError, "discriminator has " + std::to_string(net.n_params()) + " parameters (max 500)");

    const BoxDomain& box = cfg.target.domain();
    ParticleGenerator gen;
    TrainTrace trace;
    trace.realizable = cfg.target.size() == cfg.n_particles;
    if (cfg.init_at_target) {
        if (!trace.realizable) throw Error(ErrorCode::ConfigError, "init_at_target needs one particle per target atom");
        gen.theta = cfg.target.points();
    } else {
        Rng rng(derive_seed(cfg.seed, 0x696e6974));
        gen.theta = uniform_in_box(rng, box, cfg.n_particles);
    }
    const double gamma = cfg.gen_lr > 0.0 ? cfg.gen_lr : cfg.n_particles / (cfg.disc_depth * cfg.alpha + cfg.beta2);
    trace.lipschitz_l = 1.0 / gamma;
    const int m = cfg.penalty_samples > 0 ? cfg.penalty_samples : cfg.n_particles;
    Rng rng(derive_seed(cfg.seed, 0x70656e));

    Mat penalty;
    for (int s = 0; s < cfg.n_steps; ++s) {
        for (int t = 0; t < cfg.disc_steps_per_gen; ++t) {
            penalty = penalty_points(rng, gen.theta, cfg.target, m, cfg.interpolation);
            const Vec p = net.params();
            Vec grad(p.size());
            MlpNet probe = net;
            for (Eigen::Index i = 0; i < p.size(); ++i) {
                Vec q = p;
                q[i] = p[i] + cfg.fd_step;
                probe.set_params(q);
                const double up = disc_objective(probe, gen.theta, cfg.target, penalty, cfg.beta2);
                q[i] = p[i] - cfg.fd_step;
                probe.set_params(q);
                const double down = disc_objective(probe, gen.theta, cfg.target, penalty, cfg.beta2);
                grad[i] = (up - down) / (2.0 * cfg.fd_step);
            }
            net.set_params(p + cfg.disc_lr * grad);
            net = spectral_normalize(net, derive_seed(cfg.seed, 0x736e00 + s));
        }

        StepRecord rec;
        rec.step = s;
        rec.loss = disc_objective(net, gen.theta, cfg.target, penalty, cfg.beta2);
        Mat g(gen.theta.rows(), gen.theta.cols());
        for (Eigen::Index i = 0; i < gen.theta.rows(); ++i)
            g.row(i) = mlp_input_grad(net, gen.theta.row(i).transpose()).transpose() / cfg.n_particles;
        rec.grad_norm = g.norm();
        rec.step_size = gamma;
        trace.disc_norms.push_back(max_layer_norm(net));
        if (!std::isfinite(rec.loss) || std::abs(rec.loss) > kDivergenceThreshold || !std::isfinite(rec.grad_norm)) {
            rec.flags |= flags::diverged;
            trace.diverged = true;
            trace.steps.push_back(rec);
            break;
        }
        gen.theta -= gamma * g;
        if (clamp_rows(gen.theta, box)) rec.flags |= flags::clamped;
        trace.steps.push_back(rec);
    }
    trace.final_loss = disc_objective(net, gen.theta, cfg.target, penalty, cfg.beta2);
    return trace;
}

void write_trace_csv(std::ostream& os, const TrainTrace& trace) {
    os << "step,loss,grad_norm,step_size,flags\n" << std::setprecision(15);
    for (const auto& r : trace.steps)
        os << r.step << ',' << r.loss << ',' << r.grad_norm << ',' << r.step_size << ',' << flags_to_string(r.flags)
           << '\n';
}

TrainTrace read_trace_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorCode::MalformedInput, "trace CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "step,loss,grad_norm,step_size,flags")
        throw Error(ErrorCode::MalformedInput, "trace CSV header must be step,loss,grad_norm,step_size,flags");
    TrainTrace trace;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string c[5];
        for (auto& cell : c)
            if (!std::getline(ss, cell, ',')) throw Error(ErrorCode::MalformedInput, "short trace row: " + line);
        StepRecord r;
        try {
            r.step = std::stoi(c[0]);
            r.loss = std::stod(c[1]);
            r.grad_norm = std::stod(c[2]);
            r.step_size = std::stod(c[3]);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::MalformedInput, "unparsable trace row: " + line);
        }
        r.flags = parse_flags(c[4]);
        trace.diverged = trace.diverged || (r.flags & flags::diverged);
        trace.steps.push_back(r);
    }
    if (trace.steps.empty()) throw Error(ErrorCode::MalformedInput, "trace has no rows");
    trace.final_loss = trace.steps.back().loss;
    return trace;
}

std::vector<SweepRow> lr_sweep(const std::vector<double>& ratios, int n_seeds, std::uint64_t base_seed,
                               TargetKind target, int n_particles, int n_steps) {
    if (ratios.empty() || n_seeds < 1) throw Error(ErrorCode::ConfigError, "sweep needs ratios and seeds");
    std::vector<SweepRow> rows;
    for (double ratio : ratios) {
        for (int s = 0; s < n_seeds; ++s) {
            const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(s);
            TrainConfig cfg;
            cfg.target = sample_target(target, n_particles, derive_seed(seed, 0x746172), 2);
            cfg.n_particles = n_particles;
            cfg.lr_ratio = ratio;
            cfg.n_steps = n_steps;
            cfg.seed = seed;
            const TrainTrace t = train_particles(cfg);
            rows.push_back({ratio, seed, t.min_grad_norm(), t.final_loss, t.diverged});
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "ratio,seed,min_grad_norm,final_loss,diverged\n" << std::setprecision(15);
    for (const auto& r : rows)
        os << r.ratio << ',' << r.seed << ',' << r.min_grad_norm << ',' << r.final_loss << ',' << (r.diverged ? 1 : 0)
           << '\n';
}

}  // namespace gansmooth
