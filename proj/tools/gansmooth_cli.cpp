#include "gansmooth/discriminators.hpp"
#include "gansmooth/divergences.hpp"
#include "gansmooth/envelopes.hpp"
#include "gansmooth/nnsmooth.hpp"
#include "gansmooth/rkhs.hpp"
#include "gansmooth/smoothness.hpp"
#include "gansmooth/trainer.hpp"
#include "gansmooth/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace gansmooth;
using json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(fmt(v)); }

struct Globals {
    std::uint64_t seed = 7;
    std::string out;
    std::string format = "csv";
};

// A rectangular result rendered as CSV or as a JSON array of objects.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

    std::string render(const std::string& format) const {
        std::ostringstream os;
        if (format == "json") {
            json arr = json::array();
            for (const auto& r : rows) {
                json obj;
                for (std::size_t c = 0; c < columns.size(); ++c) {
                    char* end = nullptr;
                    const double v = std::strtod(r[c].c_str(), &end);
                    if (end && *end == '\0' && !r[c].empty()) obj[columns[c]] = jnum(v);
                    else obj[columns[c]] = r[c];
                }
                arr.push_back(obj);
            }
            os << arr.dump(2) << '\n';
        } else {
            for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
            os << '\n';
            for (const auto& r : rows) {
                for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
                os << '\n';
            }
        }
        return os.str();
    }
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Runner {
public:
    Runner(int argc, char** argv) : start_(std::chrono::steady_clock::now()) {
        for (int i = 0; i < argc; ++i) args_.push_back(argv[i]);
    }

    // Writes `text` to --out (plus a manifest) or to stdout.
    void emit(const Globals& g, const std::string& text, const json& extra = json::object()) {
        if (g.out.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(g.out, std::ios::binary);
        if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + g.out);
        f << text;
        f.close();
        write_manifest(g, {g.out}, extra);
    }

    void write_manifest(const Globals& g, const std::vector<std::string>& outputs, const json& extra) {
        std::string hashed;
        for (std::size_t i = 1; i < args_.size(); ++i) hashed += args_[i] + '\x1f';
        json m;
        m["command_line"] = args_;
        m["seed"] = g.seed;
        m["seed_derivation"] = "splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019))";
        char hash[17];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(hashed)));
        m["config_hash"] = hash;
        m["version"] = GANSMOOTH_VERSION;
        m["outputs"] = outputs;
        m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        if (!extra.empty()) m["details"] = extra;
        std::ofstream f(g.out + ".manifest.json");
        f << m.dump(2) << '\n';
    }

private:
    std::vector<std::string> args_;
    std::chrono::steady_clock::time_point start_;
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::ConfigError, "not a number: '" + tok + "'");
        }
    }
    if (out.empty()) throw Error(ErrorCode::ConfigError, "empty number list");
    return out;
}

KernelSpec kernel_from(double sigma_sq, bool normalized) {
    return sigma_sq > 0.0 ? KernelSpec(sigma_sq, normalized) : KernelSpec::critical();
}

// Query points from "--x 0.1,0.2" (1-D) or a CSV of coordinates with a header line.
Mat query_points(const std::string& xs, const std::string& file, int dim) {
    if (!xs.empty()) {
        if (dim != 1) throw Error(ErrorCode::DimensionMismatch, "--x is for 1-D measures; use --points");
        const auto v = parse_list(xs);
        return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + file);
    std::string line;
    std::getline(in, line);
    std::vector<double> vals;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
        const auto row = parse_list(line);
        if (static_cast<int>(row.size()) != dim) throw Error(ErrorCode::DimensionMismatch, "query point dimension");
        vals.insert(vals.end(), row.begin(), row.end());
        ++rows;
    }
    Mat m(rows, dim);
    for (int i = 0; i < rows; ++i)
        for (int a = 0; a < dim; ++a) m(i, a) = vals[static_cast<std::size_t>(i) * dim + a];
    return m;
}

EmbeddingFn read_centers(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,c" && line != "x_1,w")
        throw Error(ErrorCode::MalformedInput, "centers CSV header must be x,c (or a 1-D measure x_1,w)");
    std::vector<double> xs, cs;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto row = parse_list(line);
        if (row.size() != 2) throw Error(ErrorCode::MalformedInput, "centers CSV rows need two columns");
        xs.push_back(row[0]);
        cs.push_back(row[1]);
    }
    EmbeddingFn f;
    f.centers = Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    f.coeffs = Eigen::Map<const Vec>(cs.data(), static_cast<Eigen::Index>(cs.size()));
    return f;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string gridfn_text(const GridFn& f) {
    std::ostringstream os;
    write_gridfn_csv(os, f);
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    Runner runner(argc, argv);
    Globals g;
    CLI::App app{"Smoothness laboratory for GAN losses"};
    app.require_subcommand(1);
    app.add_option("--seed", g.seed, "64-bit base seed")->capture_default_str();
    app.add_option("--out", g.out, "output file (default: stdout)");
    app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.fallthrough();

    std::function<void()> action;

    // div eval
    std::string mu_path, mu0_path, div_name = "w1";
    double sigma_sq = 0.0;
    bool normalized = false;
    auto* div = app.add_subcommand("div", "divergence evaluation")->require_subcommand(1);
    auto* div_eval = div->add_subcommand("eval", "evaluate a divergence between two measure CSVs");
    div_eval->add_option("--loss,--div", div_name, "loss tag js|ns|w1|mmd, or kl, ns_kl, w1_lp, mmd_sq")
        ->capture_default_str();
    div_eval->add_option("--mu", mu_path, "measure CSV")->required();
    div_eval->add_option("--mu0", mu0_path, "reference measure CSV")->required();
    div_eval->add_option("--sigma-sq", sigma_sq, "kernel bandwidth (default: critical 1/(2 pi))");
    div_eval->add_flag("--normalized", normalized, "use the normalized Gaussian kernel");
    div_eval->callback([&] {
        action = [&] {
            const DiscreteMeasure mu = read_measure_csv_file(mu_path);
            const DiscreteMeasure mu0 = read_measure_csv_file(mu0_path);
            const KernelSpec k = kernel_from(sigma_sq, normalized);
            double v = 0.0;
            if (div_name == "kl") v = kl(mu, mu0);
            else if (div_name == "js") v = js(mu, mu0);
            else if (div_name == "ns_kl") v = ns_kl(mu, mu0);
            else if (div_name == "w1") v = w1(mu, mu0);
            else if (div_name == "w1_lp") v = w1_lp(mu, mu0);
            else if (div_name == "mmd_sq") v = mmd_sq(mu, mu0, k);
            else {
                const LossTag tag = parse_loss_tag(div_name);
                v = loss_eval(LossKind(tag, mu0, tag == LossTag::mmd_sq_half ? std::optional(k) : std::nullopt), mu);
            }
            if (g.format == "json") {
                Table t{{"loss", "value"}, {}};
                t.add({div_name, fmt(v)});
                runner.emit(g, t.render(g.format));
            } else {
                runner.emit(g, fmt(v) + "\n");
            }
        };
    });

    // disc eval
    std::string loss_name = "mmd", xs, points_path;
    auto* disc = app.add_subcommand("disc", "optimal discriminators")->require_subcommand(1);
    auto* disc_eval = disc->add_subcommand("eval", "evaluate Phi_mu (and its gradient) at query points");
    disc_eval->add_option("--loss", loss_name, "js, ns, w1 or mmd")->capture_default_str();
    disc_eval->add_option("--mu", mu_path, "measure CSV")->required();
    disc_eval->add_option("--mu0", mu0_path, "reference measure CSV")->required();
    std::string at;
    disc_eval->add_option("--at", at, "a single query point x1,...,xd");
    disc_eval->add_option("--x", xs, "comma-separated 1-D query points");
    disc_eval->add_option("--points", points_path, "CSV of query points (header line, one point per row)");
    disc_eval->add_option("--sigma-sq", sigma_sq, "kernel bandwidth");
    disc_eval->callback([&] {
        action = [&] {
            if (int(!at.empty()) + int(!xs.empty()) + int(!points_path.empty()) != 1)
                throw Error(ErrorCode::ConfigError, "give exactly one of --at, --x, --points");
            const DiscreteMeasure mu = read_measure_csv_file(mu_path);
            const DiscreteMeasure mu0 = read_measure_csv_file(mu0_path);
            const LossTag tag = parse_loss_tag(loss_name);
            const LossKind kind(tag, mu0,
                                tag == LossTag::mmd_sq_half ? std::optional(kernel_from(sigma_sq, false)) : std::nullopt);
            const DiscOracle phi(kind, mu);
            Mat q;
            if (!at.empty()) {
                const auto v = parse_list(at);
                if (static_cast<int>(v.size()) != mu.dim()) throw Error(ErrorCode::DimensionMismatch, "--at dimension");
                q = Eigen::Map<const Vec>(v.data(), mu.dim()).transpose();
            } else {
                q = query_points(xs, points_path, mu.dim());
            }
            Table t;
            for (int a = 0; a < mu.dim(); ++a) t.columns.push_back("x_" + std::to_string(a + 1));
            t.columns.push_back("phi");
            if (phi.supports_gradient())
                for (int a = 0; a < mu.dim(); ++a) t.columns.push_back("grad_" + std::to_string(a + 1));
            for (Eigen::Index i = 0; i < q.rows(); ++i) {
                const Vec x = q.row(i).transpose();
                std::vector<std::string> row;
                for (int a = 0; a < mu.dim(); ++a) row.push_back(fmt(x[a]));
                row.push_back(fmt(phi.value(x)));
                if (phi.supports_gradient()) {
                    const Vec gr = phi.grad(x);
                    for (int a = 0; a < mu.dim(); ++a) row.push_back(fmt(gr[a]));
                }
                t.add(std::move(row));
            }
            runner.emit(g, t.render(g.format));
        };
    });

    // smooth report
    int dim = 1, trials = 500, grid_pts = 101;
    auto* smooth = app.add_subcommand("smooth", "regularity-constant estimators")->require_subcommand(1);
    auto* smooth_report_cmd = smooth->add_subcommand("report", "estimate alpha, beta1, beta2 for a loss family");
    smooth_report_cmd->add_option("--loss", loss_name, "mmd or w1")->capture_default_str();
    smooth_report_cmd->add_option("--d", dim, "dimension")->capture_default_str();
    smooth_report_cmd->add_option("--trials", trials, "random measures per estimator")->capture_default_str();
    smooth_report_cmd->add_option("--grid", grid_pts, "1-D grid points")->capture_default_str();
    smooth_report_cmd->add_option("--sigma-sq", sigma_sq, "kernel bandwidth");
    smooth_report_cmd->callback([&] {
        action = [&] {
            const LossTag tag = parse_loss_tag(loss_name);
            if (tag != LossTag::mmd_sq_half && tag != LossTag::wasserstein1)
                throw Error(ErrorCode::GradientUnsupported, "smoothness reports need mmd or w1");
            if (dim < 1 || dim > 3 || trials < 1 || grid_pts < 2)
                throw Error(ErrorCode::ConfigError, "need 1 <= d <= 3, trials >= 1, grid >= 2");
            const SmoothnessReport r = smoothness_report(tag, dim, trials, g.seed, kernel_from(sigma_sq, false), grid_pts);
            // JSON unless csv was asked for explicitly.
            if (g.format == "json" || app.get_option("--format")->count() == 0) {
                runner.emit(g, to_json(r) + "\n");
            } else {
                Table t{{"constant", "value", "saturated", "samples"}, {}};
                for (auto [name, e] : {std::pair{"alpha", r.alpha}, {"beta1", r.beta1}, {"beta2", r.beta2}})
                    t.add({name, fmt(e.value), e.saturated ? "1" : "0", std::to_string(e.samples)});
                runner.emit(g, t.render("csv"));
            }
        };
    });

    // env
    std::string f_path, g_path;
    double alpha = 1.0, beta = 1.0;
    auto* env = app.add_subcommand("env", "inf-convolution envelopes of grid functions")->require_subcommand(1);
    auto* env_inf = env->add_subcommand("infconv", "f (+) g on a shared grid");
    env_inf->add_option("--f", f_path, "grid CSV")->required();
    env_inf->add_option("--g", g_path, "grid CSV")->required();
    env_inf->callback([&] {
        action = [&] { runner.emit(g, gridfn_text(inf_conv(read_gridfn_csv_file(f_path), read_gridfn_csv_file(g_path)))); };
    });
    auto* env_ph = env->add_subcommand("ph", "Pasch-Hausdorff envelope f (+) alpha |.|");
    env_ph->add_option("--f", f_path, "grid CSV")->required();
    env_ph->add_option("--alpha", alpha, "Lipschitz constant")->capture_default_str();
    env_ph->callback([&] {
        action = [&] { runner.emit(g, gridfn_text(pasch_hausdorff(read_gridfn_csv_file(f_path), alpha))); };
    });
    auto* env_mo = env->add_subcommand("moreau", "Moreau envelope f (+) (beta/2) |.|^2");
    env_mo->add_option("--f", f_path, "grid CSV")->required();
    env_mo->add_option("--beta", beta, "gradient Lipschitz constant")->capture_default_str();
    env_mo->callback([&] { action = [&] { runner.emit(g, gridfn_text(moreau(read_gridfn_csv_file(f_path), beta))); }; });
    auto* env_lg = env->add_subcommand("legendre", "discrete convex conjugate");
    env_lg->add_option("--f", f_path, "grid CSV")->required();
    env_lg->callback([&] { action = [&] { runner.emit(g, gridfn_text(legendre(read_gridfn_csv_file(f_path)))); }; });

    // rkhs series
    std::string centers_path;
    int order = 20;
    auto* rkhs = app.add_subcommand("rkhs", "Gaussian RKHS norms")->require_subcommand(1);
    auto* rkhs_series = rkhs->add_subcommand("series", "partial sums of the derivative-series norm");
    rkhs_series->add_option("--centers", centers_path, "CSV with header x,c")->required();
    rkhs_series->add_option("--order", order, "highest derivative order (<= 30)")->capture_default_str();
    rkhs_series->callback([&] {
        action = [&] {
            const EmbeddingFn f = read_centers(centers_path);
            const auto sums = truncated_series_norm(f, order);
            Table t{{"order", "partial_sum"}, {}};
            for (std::size_t k = 0; k < sums.size(); ++k) t.add({std::to_string(k), fmt(sums[k])});
            runner.emit(g, t.render(g.format), json{{"gram_norm_sq", f.norm_sq()}});
        };
    });

    // nn
    std::string net_path, act_name = "elu";
    int depth = 3, width = 16, pairs = 2000, iters = 200;
    double final_scale = 1.0;
    auto* nn = app.add_subcommand("nn", "spectrally normalized networks")->require_subcommand(1);
    auto* nn_init = nn->add_subcommand("init", "random network as JSON");
    nn_init->add_option("--d", dim, "input dimension")->capture_default_str();
    nn_init->add_option("--depth", depth, "number of linear layers")->capture_default_str();
    nn_init->add_option("--width", width, "hidden width")->capture_default_str();
    nn_init->add_option("--activation", act_name, "elu, sigmoid or relu")->capture_default_str();
    nn_init->add_option("--scale", final_scale, "final output multiplier")->capture_default_str();
    nn_init->callback([&] {
        action = [&] {
            runner.emit(g, to_json(make_mlp(dim, width, depth, parse_activation(act_name), final_scale, g.seed)) + "\n");
        };
    });
    auto* nn_norm = nn->add_subcommand("specnorm", "per-layer power-iteration and SVD operator norms");
    nn_norm->add_option("--net", net_path, "network JSON")->required();
    nn_norm->add_option("--iters", iters, "power iterations")->capture_default_str();
    nn_norm->callback([&] {
        action = [&] {
            const MlpNet net = mlp_from_json(read_file(net_path));
            Table t{{"layer", "power_iteration", "svd"}, {}};
            for (int l = 0; l < net.depth(); ++l) {
                const double est = power_iteration_specnorm(net.layers[l].weight, iters, derive_seed(g.seed, l));
                Eigen::JacobiSVD<Mat> svd(net.layers[l].weight);
                t.add({std::to_string(l), fmt(est), fmt(svd.singularValues()[0])});
            }
            runner.emit(g, t.render(g.format));
        };
    });
    auto* nn_normalize = nn->add_subcommand("normalize", "spectrally normalize a network");
    nn_normalize->add_option("--net", net_path, "network JSON")->required();
    nn_normalize->callback([&] {
        action = [&] { runner.emit(g, to_json(spectral_normalize(mlp_from_json(read_file(net_path)), g.seed)) + "\n"); };
    });
    auto* nn_check = nn->add_subcommand("check", "empirical Lipschitz and smoothness estimates on [-1,1]^d");
    nn_check->add_option("--net", net_path, "network JSON")->required();
    nn_check->add_option("--pairs", pairs, "sampled point pairs")->capture_default_str();
    nn_check->callback([&] {
        action = [&] {
            const MlpNet net = mlp_from_json(read_file(net_path));
            const BoxDomain box = BoxDomain::unit(net.input_dim());
            Table t{{"quantity", "value", "bound"}, {}};
            t.add({"lipschitz", fmt(empirical_lipschitz(net, box, pairs, g.seed)), fmt(std::abs(net.final_scale))});
            if (net.activation != Activation::relu)
                t.add({"smoothness", fmt(empirical_smoothness(net, box, pairs, g.seed)),
                       fmt(net.depth() * std::abs(net.final_scale))});
            t.add({"max_layer_norm", fmt(max_layer_norm(net)), fmt(1.0 + kSpecNormSafety)});
            runner.emit(g, t.render(g.format));
        };
    });

    // train
    std::string target_name = "ring", config_path;
    int n_particles = 64, steps = 10000;
    double lr_ratio = 1.0, beta1_bound = 4.0 * kPi, beta2_bound = 2.0 * kPi;
    auto* train = app.add_subcommand("train", "training runs")->require_subcommand(1);
    auto* train_p = train->add_subcommand("particles", "gradient descent of MMD^2/2 on a particle generator");
    train_p->add_option("--target", target_name, "ring, gaussian_mixture or grid_uniform, or a measure CSV")
        ->capture_default_str();
    train_p->add_option("--n", n_particles, "particles")->capture_default_str();
    train_p->add_option("--lr-ratio", lr_ratio, "step size / gamma0")->capture_default_str();
    train_p->add_option("--steps", steps, "gradient steps")->capture_default_str();
    train_p->add_option("--beta1", beta1_bound, "beta1 fed to gamma0")->capture_default_str();
    train_p->add_option("--beta2", beta2_bound, "beta2 fed to gamma0")->capture_default_str();
    train_p->callback([&] {
        action = [&] {
            TrainConfig cfg;
            const bool is_file = target_name.find('.') != std::string::npos;
            cfg.target = is_file ? read_measure_csv_file(target_name)
                                 : sample_target(parse_target_kind(target_name), n_particles, derive_seed(g.seed, 0x746172));
            cfg.n_particles = n_particles;
            cfg.lr_ratio = lr_ratio;
            cfg.n_steps = steps;
            cfg.seed = g.seed;
            cfg.beta1_bound = beta1_bound;
            cfg.beta2_bound = beta2_bound;
            const TrainTrace tr = train_particles(cfg);
            std::ostringstream os;
            write_trace_csv(os, tr);
            const StationarityCheck st = stationarity_bound(tr, tr.lipschitz_l, tr.bound_reference());
            runner.emit(g, os.str(),
                        json{{"L", tr.lipschitz_l},
                             {"J0", tr.initial_loss()},
                             {"final_loss", tr.final_loss},
                             {"min_grad_norm", tr.min_grad_norm()},
                             {"stationarity_bound_holds", st.holds},
                             {"bound_kind", tr.realizable ? "exact" : "surrogate bound"},
                             {"descent_violation", descent_violation(tr, tr.lipschitz_l)},
                             {"nonmonotone_fraction", tr.nonmonotone_fraction()},
                             {"diverged", tr.diverged}});
        };
    });
    auto* train_g = train->add_subcommand("gan2d", "alternating loop with a penalized network discriminator");
    train_g->add_option("--config", config_path, "JSON config")->required();
    train_g->callback([&] {
        action = [&] {
            const GanLoopConfig cfg = gan_config_from_json(read_file(config_path));
            const TrainTrace tr = train_gan2d(cfg);
            std::ostringstream os;
            write_trace_csv(os, tr);
            runner.emit(g, os.str(),
                        json{{"config", json::parse(to_json(cfg))},
                             {"max_disc_norm", *std::max_element(tr.disc_norms.begin(), tr.disc_norms.end())},
                             {"diverged", tr.diverged}});
        };
    });

    // sweep
    std::string ratios = "0.1,1,10,100,1000";
    int n_seeds = 5;
    steps = 10000;
    auto* sweep = app.add_subcommand("sweep", "learning-rate sweep over lr_ratio x seeds");
    sweep->add_option("--ratios", ratios, "comma-separated lr ratios")->capture_default_str();
    sweep->add_option("--seeds", n_seeds, "seeds per ratio (base seed + i)")->capture_default_str();
    sweep->add_option("--target", target_name, "target kind")->capture_default_str();
    sweep->add_option("--n", n_particles, "particles")->capture_default_str();
    sweep->add_option("--steps", steps, "steps per run")->capture_default_str();
    sweep->callback([&] {
        action = [&] {
            const auto rows = lr_sweep(parse_list(ratios), n_seeds, g.seed, parse_target_kind(target_name), n_particles, steps);
            std::ostringstream os;
            write_sweep_csv(os, rows);
            runner.emit(g, os.str());
        };
    });

    // verify
    std::string suite = "all";
    double verify_beta2 = 2.0 * kPi;
    int exit_code = 0;
    auto* verify_cmd = app.add_subcommand("verify", "run an acceptance suite; exit 0 iff every check passes");
    verify_cmd->add_option("--suite", suite, "all, divergences, smoothness, envelopes, rkhs, nnsmooth, trainer")
        ->capture_default_str();
    verify_cmd->add_option("--beta2", verify_beta2, "beta2 used by the trainer suite")->capture_default_str();
    verify_cmd->callback([&] {
        action = [&] {
            verify::Options opts;
            opts.seed = g.seed;
            opts.trainer_beta2 = verify_beta2;
            const auto results = verify::run_suite(suite, opts);
            std::ostringstream os;
            verify::print(os, results);
            runner.emit(g, os.str());
            if (!g.out.empty()) verify::print(std::cout, results);
            exit_code = verify::all_passed(results) ? 0 : 1;
        };
    });

    // plotdata
    std::string trace_path, sweep_path;
    auto* plot = app.add_subcommand("plotdata", "two-column series for gnuplot");
    plot->add_option("--trace", trace_path, "trace CSV -> (step, grad_norm)");
    plot->add_option("--sweep", sweep_path, "sweep CSV -> (ratio, min_grad_norm), ratios ascending");
    plot->callback([&] {
        action = [&] {
            if (trace_path.empty() == sweep_path.empty()) throw Error(ErrorCode::ConfigError, "give exactly one of --trace, --sweep");
            std::ostringstream os;
            if (!trace_path.empty()) {
                std::ifstream in(trace_path);
                if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + trace_path);
                const TrainTrace tr = read_trace_csv(in);
                os << "# step grad_norm\n";
                for (const auto& r : tr.steps) os << r.step << ' ' << fmt(r.grad_norm) << '\n';
            } else {
                std::ifstream in(sweep_path);
                if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + sweep_path);
                std::string line;
                std::getline(in, line);
                if (line.rfind("ratio,seed,min_grad_norm", 0) != 0)
                    throw Error(ErrorCode::MalformedInput, "sweep CSV header must start with ratio,seed,min_grad_norm");
                std::vector<std::pair<double, double>> pts;
                while (std::getline(in, line)) {
                    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                    const auto v = parse_list(line);
                    if (v.size() < 3) throw Error(ErrorCode::MalformedInput, "short sweep row");
                    pts.emplace_back(v[0], v[2]);
                }
                if (pts.empty()) throw Error(ErrorCode::MalformedInput, "sweep has no rows");
                std::stable_sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });
                os << "# ratio min_grad_norm\n";
                for (const auto& [r, m] : pts) os << fmt(r) << ' ' << fmt(m) << '\n';
            }
            runner.emit(g, os.str());
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (action) action();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return exit_code;
}
