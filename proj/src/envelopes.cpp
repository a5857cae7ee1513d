#include "gansmooth/envelopes.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

namespace gansmooth {

namespace {

int lattice_count(double lo, double hi, double step) {
    const double cells = (hi - lo) / step;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-6 * std::max(1.0, rounded))
        throw Error(ErrorCode::GridMismatch, "grid step must divide the box side");
    return static_cast<int>(rounded) + 1;
}

}  // namespace

GridFn::GridFn(BoxDomain domain, double step, Vec values)
    : domain_(std::move(domain)), step_(step), values_(std::move(values)) {
    if (domain_.dim() > 2) throw Error(ErrorCode::DimensionMismatch, "GridFn supports 1-D and 2-D boxes");
    if (!(step_ > 0.0)) throw Error(ErrorCode::GridMismatch, "grid step must be positive");
    for (int a = 0; a < domain_.dim(); ++a) extent_[a] = lattice_count(domain_.lo[a], domain_.hi[a], step_);
    if (values_.size() != static_cast<Eigen::Index>(extent_[0]) * extent_[1])
        throw Error(ErrorCode::GridMismatch, "value count does not match the lattice");
    bool proper = false;
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        if (std::isnan(values_[i]) || values_[i] == -kInf)
            throw Error(ErrorCode::MalformedInput, "grid values must be finite or +inf");
        proper = proper || std::isfinite(values_[i]);
    }
    if (!proper) throw Error(ErrorCode::EmptyDomain, "grid function is +inf everywhere");
}

GridFn GridFn::sample(const BoxDomain& domain, double step, const std::function<double(const Vec&)>& f) {
    const int n0 = lattice_count(domain.lo[0], domain.hi[0], step);
    const int n1 = domain.dim() == 2 ? lattice_count(domain.lo[1], domain.hi[1], step) : 1;
    Vec values(static_cast<Eigen::Index>(n0) * n1);
    Vec x(domain.dim());
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            x[0] = domain.lo[0] + step * i;
            if (domain.dim() == 2) x[1] = domain.lo[1] + step * j;
            values[static_cast<Eigen::Index>(i) * n1 + j] = f(x);
        }
    }
    return GridFn(domain, step, std::move(values));
}

Vec GridFn::node(int flat) const {
    Vec x(dim());
    if (dim() == 1) {
        x[0] = domain_.lo[0] + step_ * flat;
    } else {
        x[0] = domain_.lo[0] + step_ * (flat / extent_[1]);
        x[1] = domain_.lo[1] + step_ * (flat % extent_[1]);
    }
    return x;
}

bool GridFn::on_boundary(int flat, int margin) const {
    const int idx[2] = {dim() == 1 ? flat : flat / extent_[1], dim() == 1 ? 0 : flat % extent_[1]};
    for (int a = 0; a < dim(); ++a)
        if (idx[a] < margin || idx[a] >= extent_[a] - margin) return true;
    return false;
}

bool GridFn::same_grid(const GridFn& other) const {
    if (dim() != other.dim() || std::abs(step_ - other.step_) > 1e-12 * step_) return false;
    for (int a = 0; a < dim(); ++a) {
        if (extent_[a] != other.extent_[a]) return false;
        if (std::abs(domain_.lo[a] - other.domain_.lo[a]) > 1e-9 * step_) return false;
    }
    return true;
}

namespace {

// Generic lattice inf-convolution: out(i) = min_j f(j) + cost(i - j) with
// the offset given in lattice units per axis.
template <class Cost>
GridFn inf_conv_impl(const GridFn& f, Cost cost) {
    const long n = f.size();
    if (n * n > kMaxInfConvPairs) throw Error(ErrorCode::ProblemTooLarge, "inf-convolution capped at 1e9 cell pairs");
    const int d = f.dim();
    const int n1 = d == 2 ? f.extent(1) : 1;
    std::vector<int> finite;
    for (int j = 0; j < n; ++j)
        if (std::isfinite(f[j])) finite.push_back(j);
    Vec out(n);
    for (int i = 0; i < n; ++i) {
        const int i0 = i / n1, i1 = i % n1;
        double best = kInf;
        for (int j : finite) {
            const double c = cost(i0 - j / n1, i1 - j % n1);
            if (!std::isfinite(c)) continue;
            best = std::min(best, f[j] + c);
        }
        out[i] = best;
    }
    return GridFn(f.domain(), f.step(), std::move(out));
}

}  // namespace

GridFn inf_conv(const GridFn& f, const GridFn& g) {
    if (!f.same_grid(g)) throw Error(ErrorCode::GridMismatch, "inf_conv needs identical grids");
    int origin[2] = {0, 0};
    for (int a = 0; a < g.dim(); ++a) {
        const double o = -g.domain().lo[a] / g.step();
        origin[a] = static_cast<int>(std::round(o));
        if (std::abs(o - origin[a]) > 1e-6 || origin[a] < 0 || origin[a] >= g.extent(a))
            throw Error(ErrorCode::GridMismatch, "grid lattice must contain the origin");
    }
    const int n0 = g.extent(0);
    const int n1 = g.dim() == 2 ? g.extent(1) : 1;
    return inf_conv_impl(f, [&](int d0, int d1) {
        const int k0 = d0 + origin[0];
        const int k1 = d1 + origin[1];
        if (k0 < 0 || k0 >= n0 || k1 < 0 || k1 >= n1) return kInf;
        return g[k0 * n1 + k1];
    });
}

GridFn pasch_hausdorff(const GridFn& f, double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::NonPositiveAlpha, "Pasch-Hausdorff needs alpha > 0");
    const double h = f.step();
    return inf_conv_impl(f, [=](int d0, int d1) { return alpha * h * std::sqrt(double(d0) * d0 + double(d1) * d1); });
}

GridFn moreau(const GridFn& f, double beta) {
    if (!(beta > 0.0)) throw Error(ErrorCode::NonPositiveBeta, "Moreau envelope needs beta > 0");
    const double c = 0.5 * beta * f.step() * f.step();
    return inf_conv_impl(f, [=](int d0, int d1) { return c * (double(d0) * d0 + double(d1) * d1); });
}

GridFn legendre(const GridFn& f, std::optional<BoxDomain> dual) {
    const BoxDomain box = dual ? *dual : f.domain();
    if (box.dim() != f.dim()) throw Error(ErrorCode::DimensionMismatch, "dual grid dimension");
    const GridFn shape = GridFn::sample(box, f.step(), [](const Vec&) { return 0.0; });
    std::vector<int> finite;
    for (int j = 0; j < f.size(); ++j)
        if (std::isfinite(f[j])) finite.push_back(j);
    Mat nodes(finite.size(), f.dim());
    std::vector<char> boundary(finite.size());
    for (std::size_t k = 0; k < finite.size(); ++k) {
        nodes.row(k) = f.node(finite[k]).transpose();
        boundary[k] = f.on_boundary(finite[k]);
    }
    Vec out(shape.size());
    for (int i = 0; i < shape.size(); ++i) {
        const Vec z = shape.node(i);
        double best_inner = -kInf;
        double best_edge = -kInf;
        for (std::size_t k = 0; k < finite.size(); ++k) {
            const double v = nodes.row(k).dot(z) - f[finite[k]];
            double& slot = boundary[k] ? best_edge : best_inner;
            slot = std::max(slot, v);
        }
        const double best = std::max(best_inner, best_edge);
        const double tol = 1e-12 * std::max(1.0, std::abs(best));
        out[i] = best_edge > best_inner + tol ? kInf : best;
    }
    bool any = false;
    for (Eigen::Index i = 0; i < out.size(); ++i) any = any || std::isfinite(out[i]);
    if (!any) throw Error(ErrorCode::EmptyDomain, "conjugate is +inf on the whole dual grid");
    return GridFn(box, f.step(), std::move(out));
}

double conjugate_sum_identity_check(const GridFn& f, const GridFn& g, std::optional<BoxDomain> dual) {
    const GridFn lhs = legendre(inf_conv(f, g), dual);
    const GridFn cf = legendre(f, dual);
    const GridFn cg = legendre(g, dual);
    double worst = 0.0;
    int compared = 0;
    for (int i = 0; i < lhs.size(); ++i) {
        if (lhs.on_boundary(i)) continue;
        if (!std::isfinite(lhs[i]) || !std::isfinite(cf[i]) || !std::isfinite(cg[i])) continue;
        worst = std::max(worst, std::abs(lhs[i] - (cf[i] + cg[i])));
        ++compared;
    }
    if (compared == 0) throw Error(ErrorCode::PreconditionViolated, "no interior dual node with finite conjugates");
    return worst;
}

bool minimizer_invariance_check(const GridFn& f, const GridFn& g) {
    if (!f.same_grid(g)) throw Error(ErrorCode::GridMismatch, "minimizer check needs identical grids");
    int origin = 0;
    for (int a = 0; a < g.dim(); ++a) {
        const int o = static_cast<int>(std::round(-g.domain().lo[a] / g.step()));
        origin = a == 0 ? o : origin * g.extent(1) + o;
    }
    if (origin < 0 || origin >= g.size() || std::abs(g[origin]) > 1e-12)
        throw Error(ErrorCode::PreconditionViolated, "regularizer must satisfy g(0) = 0");
    if (g.values().minCoeff() < -1e-12)
        throw Error(ErrorCode::PreconditionViolated, "regularizer must have min g = 0");

    const GridFn h = inf_conv(f, g);
    constexpr double tol = 1e-9;
    const double fmin = f.values().minCoeff();
    const double hmin = h.values().minCoeff();
    if (std::abs(fmin - hmin) > tol) return false;
    for (int i = 0; i < f.size(); ++i)
        if ((f[i] <= fmin + tol) != (h[i] <= hmin + tol)) return false;
    return true;
}

double max_slope(const GridFn& f) {
    if (f.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "max_slope is 1-D");
    double worst = 0.0;
    for (int i = 0; i + 1 < f.size(); ++i)
        if (std::isfinite(f[i]) && std::isfinite(f[i + 1]))
            worst = std::max(worst, std::abs(f[i + 1] - f[i]) / f.step());
    return worst;
}

double max_second_difference(const GridFn& f, int margin) {
    if (f.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "max_second_difference is 1-D");
    const double h2 = f.step() * f.step();
    double worst = 0.0;
    for (int i = std::max(1, margin); i + std::max(1, margin) < f.size(); ++i) {
        if (!std::isfinite(f[i - 1]) || !std::isfinite(f[i]) || !std::isfinite(f[i + 1])) continue;
        worst = std::max(worst, std::abs(f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2);
    }
    return worst;
}

void write_gridfn_csv(std::ostream& os, const GridFn& f) {
    os << (f.dim() == 1 ? "x,value\n" : "x,y,value\n");
    os << std::setprecision(15);
    for (int i = 0; i < f.size(); ++i) {
        const Vec x = f.node(i);
        for (int a = 0; a < f.dim(); ++a) os << x[a] << ',';
        if (std::isfinite(f[i])) os << f[i] << '\n';
        else os << "inf\n";
    }
}

GridFn read_gridfn_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorCode::MalformedInput, "grid CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    int dim = 0;
    if (line == "x,value") dim = 1;
    else if (line == "x,y,value") dim = 2;
    else throw Error(ErrorCode::MalformedInput, "grid CSV header must be x,value or x,y,value");

    // Keyed by coordinates so row order in the file does not matter.
    std::map<std::pair<double, double>, double> cells;
    std::vector<double> xs, ys;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::stringstream ss(line);
        std::string c[3];
        for (int k = 0; k <= dim; ++k)
            if (!std::getline(ss, c[k], ',')) throw Error(ErrorCode::MalformedInput, "short row: " + line);
        try {
            const double x = std::stod(c[0]);
            const double y = dim == 2 ? std::stod(c[1]) : 0.0;
            std::string v = c[dim];
            v.erase(std::remove_if(v.begin(), v.end(), [](char ch) { return std::isspace(ch); }), v.end());
            const double val = (v == "inf" || v == "+inf" || v == "Inf") ? kInf : std::stod(v);
            cells[{x, y}] = val;
            xs.push_back(x);
            ys.push_back(y);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::MalformedInput, "unparsable row: " + line);
        }
    }
    if (cells.size() < 2) throw Error(ErrorCode::MalformedInput, "grid CSV needs at least two nodes");
    auto uniq = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    xs = uniq(xs);
    ys = uniq(ys);
    const double step = xs.size() > 1 ? (xs.back() - xs.front()) / (xs.size() - 1) : (ys.back() - ys.front()) / (ys.size() - 1);
    Vec lo(dim), hi(dim);
    lo[0] = xs.front();
    hi[0] = xs.back();
    if (dim == 2) {
        lo[1] = ys.front();
        hi[1] = ys.back();
    }
    const BoxDomain box(lo, hi);
    const GridFn shape = GridFn::sample(box, step, [](const Vec&) { return 0.0; });
    if (static_cast<std::size_t>(shape.size()) != cells.size())
        throw Error(ErrorCode::MalformedInput, "grid CSV does not describe a full uniform lattice");
    Vec values(shape.size());
    auto it = cells.begin();
    for (int i = 0; i < shape.size(); ++i, ++it) values[i] = it->second;
    return GridFn(box, step, std::move(values));
}

GridFn read_gridfn_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MalformedInput, "cannot open " + path);
    return read_gridfn_csv(in);
}

}  // namespace gansmooth
