#include "gansmooth/nnsmooth.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace gansmooth {

namespace {

double act(Activation a, double z) {
    switch (a) {
        case Activation::elu: return z > 0.0 ? z : std::expm1(z);
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::relu: return z > 0.0 ? z : 0.0;
    }
    return z;
}

double act_deriv(Activation a, double z) {
    switch (a) {
        case Activation::elu: return z > 0.0 ? 1.0 : std::exp(z);
        case Activation::sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-z));
            return s * (1.0 - s);
        }
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    }
    return 1.0;
}

Vec random_unit(Rng& rng, Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
    const double norm = v.norm();
    return norm > 0.0 ? Vec(v / norm) : Vec(Vec::Unit(n, 0));
}

Vec random_point(Rng& rng, const BoxDomain& domain) {
    Vec x(domain.dim());
    for (int a = 0; a < domain.dim(); ++a) x[a] = rng.uniform(domain.lo[a], domain.hi[a]);
    return x;
}

// Second point of a pair: independent for even k, a nearby point otherwise.
Vec partner(Rng& rng, const BoxDomain& domain, const Vec& x, int k) {
    if (k % 2 == 0) return random_point(rng, domain);
    const double r = std::pow(10.0, rng.uniform(-4.0, -1.0));
    return domain.clamp(x + r * random_unit(rng, x.size()));
}

}  // namespace

Activation parse_activation(std::string_view name) {
    if (name == "elu") return Activation::elu;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "relu") return Activation::relu;
    throw Error(ErrorCode::UnknownKind, "unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::elu: return "elu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::relu: return "relu";
    }
    return "?";
}

void MlpNet::validate() const {
    if (layers.empty()) throw Error(ErrorCode::DimensionMismatch, "network has no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& L = layers[l];
        if (L.weight.rows() == 0 || L.weight.cols() == 0 || L.bias.size() != L.weight.rows())
            throw Error(ErrorCode::DimensionMismatch, "layer " + std::to_string(l) + " has inconsistent shapes");
        if (l > 0 && L.weight.cols() != layers[l - 1].weight.rows())
            throw Error(ErrorCode::DimensionMismatch, "layer " + std::to_string(l) + " does not chain");
    }
    if (layers.back().weight.rows() != 1) throw Error(ErrorCode::DimensionMismatch, "network output must be scalar");
}

int MlpNet::input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols()); }

int MlpNet::n_params() const {
    int n = 0;
    for (const auto& L : layers) n += static_cast<int>(L.weight.size() + L.bias.size());
    return n;
}

Vec MlpNet::params() const {
    Vec p(n_params());
    Eigen::Index k = 0;
    for (const auto& L : layers) {
        for (Eigen::Index r = 0; r < L.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < L.weight.cols(); ++c) p[k++] = L.weight(r, c);
        for (Eigen::Index r = 0; r < L.bias.size(); ++r) p[k++] = L.bias[r];
    }
    return p;
}

void MlpNet::set_params(const Vec& p) {
    if (p.size() != n_params()) throw Error(ErrorCode::LengthMismatch, "parameter vector length");
    Eigen::Index k = 0;
    for (auto& L : layers) {
        for (Eigen::Index r = 0; r < L.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < L.weight.cols(); ++c) L.weight(r, c) = p[k++];
        for (Eigen::Index r = 0; r < L.bias.size(); ++r) L.bias[r] = p[k++];
    }
}

MlpNet make_mlp(int input_dim, int width, int depth, Activation act_kind, double final_scale, std::uint64_t seed,
                bool normalize) {
    if (input_dim < 1 || width < 1 || depth < 1) throw Error(ErrorCode::ConfigError, "network sizes must be positive");
    Rng rng(derive_seed(seed, 0x6e6574));
    MlpNet net;
    net.activation = act_kind;
    net.final_scale = final_scale;
    int fan_in = input_dim;
    for (int l = 0; l < depth; ++l) {
        const int out = l + 1 == depth ? 1 : width;
        const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
        DenseLayer L{Mat(out, fan_in), Vec(out)};
        for (Eigen::Index r = 0; r < L.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < L.weight.cols(); ++c) L.weight(r, c) = rng.uniform(-a, a);
        for (Eigen::Index r = 0; r < out; ++r) L.bias[r] = rng.uniform(-a, a);
        net.layers.push_back(std::move(L));
        fan_in = out;
    }
    return normalize ? spectral_normalize(net, seed) : net;
}

double mlp_forward(const MlpNet& net, const Eigen::Ref<const Vec>& x) {
    if (x.size() != net.input_dim()) throw Error(ErrorCode::DimensionMismatch, "network input dimension");
    Vec h = x;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Vec z = net.layers[l].weight * h + net.layers[l].bias;
        if (l + 1 < net.layers.size()) z = z.unaryExpr([&](double v) { return act(net.activation, v); });
        h = std::move(z);
    }
    return net.final_scale * h[0];
}

Vec mlp_input_grad(const MlpNet& net, const Eigen::Ref<const Vec>& x) {
    if (x.size() != net.input_dim()) throw Error(ErrorCode::DimensionMismatch, "network input dimension");
    const std::size_t n = net.layers.size();
    std::vector<Vec> pre(n);
    Vec h = x;
    for (std::size_t l = 0; l + 1 < n; ++l) {
        pre[l] = net.layers[l].weight * h + net.layers[l].bias;
        h = pre[l].unaryExpr([&](double v) { return act(net.activation, v); });
    }
    Vec g = net.final_scale * net.layers[n - 1].weight.row(0).transpose();
    for (std::size_t l = n - 1; l-- > 0;) {
        const Vec d = pre[l].unaryExpr([&](double v) { return act_deriv(net.activation, v); });
        g = net.layers[l].weight.transpose() * d.cwiseProduct(g);
    }
    return g;
}

PowerIterState power_iteration(const Mat& w, int iters, PowerIterState state) {
    if (iters < 1) throw Error(ErrorCode::PreconditionViolated, "power iteration needs iters >= 1");
    if (state.v.size() != w.cols()) throw Error(ErrorCode::DimensionMismatch, "warm-start vector length");
    if (w.cwiseAbs().maxCoeff() == 0.0) {
        state.zero = true;
        state.estimate = 0.0;
        state.u = Vec::Unit(w.rows(), 0);
        return state;
    }
    for (int it = 0; it < iters; ++it) {
        Vec wv = w * state.v;
        double norm = wv.norm();
        if (norm == 0.0) {
            // v fell into the null space; restart along the largest column.
            Eigen::Index c = 0;
            w.colwise().norm().maxCoeff(&c);
            state.v = Vec::Unit(w.cols(), c);
            wv = w * state.v;
            norm = wv.norm();
        }
        state.u = wv / norm;
        const Vec wtu = w.transpose() * state.u;
        state.v = wtu / wtu.norm();
        ++state.n_iters;
    }
    state.estimate = (w * state.v).norm();
    return state;
}

PowerIterState power_iteration(const Mat& w, int iters, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x706f776572));
    PowerIterState s;
    s.v = random_unit(rng, w.cols());
    return power_iteration(w, iters, std::move(s));
}

double power_iteration_specnorm(const Mat& w, int iters, std::uint64_t seed) {
    return power_iteration(w, iters, seed).estimate;
}

namespace {

// Runs power iteration until the estimate stops moving at double precision.
double converged_specnorm(const Mat& w, std::uint64_t seed) {
    PowerIterState s = power_iteration(w, 20, seed);
    if (s.zero) return 0.0;
    for (int round = 0; round < 500; ++round) {
        const double before = s.estimate;
        s = power_iteration(w, 20, std::move(s));
        if (s.estimate - before <= 1e-15 * s.estimate) break;
    }
    return s.estimate;
}

}  // namespace

MlpNet spectral_normalize(const MlpNet& net, std::uint64_t seed) {
    net.validate();
    MlpNet out = net;
    for (std::size_t l = 0; l < out.layers.size(); ++l) {
        const double s = converged_specnorm(out.layers[l].weight, derive_seed(seed, l));
        if (s > 0.0) out.layers[l].weight /= s * (1.0 + kSpecNormSafety);
    }
    return out;
}

std::vector<int> zero_layers(const MlpNet& net) {
    std::vector<int> out;
    for (std::size_t l = 0; l < net.layers.size(); ++l)
        if (net.layers[l].weight.cwiseAbs().maxCoeff() == 0.0) out.push_back(static_cast<int>(l));
    return out;
}

double max_layer_norm(const MlpNet& net) {
    double worst = 0.0;
    for (const auto& L : net.layers) {
        Eigen::JacobiSVD<Mat> svd(L.weight);
        worst = std::max(worst, svd.singularValues()[0]);
    }
    return worst;
}

double empirical_lipschitz(const MlpNet& net, const BoxDomain& domain, int n_pairs, std::uint64_t seed) {
    net.validate();
    if (domain.dim() != net.input_dim()) throw Error(ErrorCode::DimensionMismatch, "domain and network input differ");
    Rng rng(derive_seed(seed, 0x6c6970));
    double worst = 0.0;
    for (int k = 0; k < n_pairs; ++k) {
        const Vec x = random_point(rng, domain);
        const Vec y = partner(rng, domain, x, k);
        const double dist = (x - y).norm();
        if (dist == 0.0) continue;
        worst = std::max(worst, std::abs(mlp_forward(net, x) - mlp_forward(net, y)) / dist);
    }
    return worst;
}

double empirical_smoothness(const MlpNet& net, const BoxDomain& domain, int n_pairs, std::uint64_t seed) {
    net.validate();
    if (net.activation == Activation::relu)
        throw Error(ErrorCode::NonSmoothActivation, "smoothness is undefined for relu networks");
    if (domain.dim() != net.input_dim()) throw Error(ErrorCode::DimensionMismatch, "domain and network input differ");
    Rng rng(derive_seed(seed, 0x736d6f));
    double worst = 0.0;
    for (int k = 0; k < n_pairs; ++k) {
        const Vec x = random_point(rng, domain);
        const Vec y = partner(rng, domain, x, k);
        const double dist = (x - y).norm();
        if (dist == 0.0) continue;
        worst = std::max(worst, (mlp_input_grad(net, x) - mlp_input_grad(net, y)).norm() / dist);
    }
    return worst;
}

std::string to_json(const MlpNet& net) {
    nlohmann::ordered_json j;
    j["activation"] = std::string(to_string(net.activation));
    j["final_scale"] = net.final_scale;
    j["layers"] = nlohmann::json::array();
    for (const auto& L : net.layers) {
        nlohmann::ordered_json lj;
        lj["rows"] = L.weight.rows();
        lj["cols"] = L.weight.cols();
        std::vector<double> w;
        for (Eigen::Index r = 0; r < L.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < L.weight.cols(); ++c) w.push_back(L.weight(r, c));
        lj["weights"] = w;
        lj["bias"] = std::vector<double>(L.bias.data(), L.bias.data() + L.bias.size());
        j["layers"].push_back(lj);
    }
    return j.dump(2);
}

MlpNet mlp_from_json(const std::string& text) {
    MlpNet net;
    try {
        const auto j = nlohmann::json::parse(text);
        net.activation = parse_activation(j.at("activation").get<std::string>());
        net.final_scale = j.value("final_scale", 1.0);
        for (const auto& lj : j.at("layers")) {
            const int rows = lj.at("rows").get<int>();
            const int cols = lj.at("cols").get<int>();
            const auto w = lj.at("weights").get<std::vector<double>>();
            const auto b = lj.at("bias").get<std::vector<double>>();
            if (rows < 1 || cols < 1 || static_cast<long>(w.size()) != long(rows) * cols ||
                static_cast<int>(b.size()) != rows)
                throw Error(ErrorCode::MalformedInput, "layer arrays do not match the declared shape");
            DenseLayer L{Mat(rows, cols), Vec(rows)};
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c) L.weight(r, c) = w[static_cast<std::size_t>(r) * cols + c];
            for (int r = 0; r < rows; ++r) L.bias[r] = b[r];
            net.layers.push_back(std::move(L));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("network JSON: ") + e.what());
    }
    net.validate();
    return net;
}

}  // namespace gansmooth
