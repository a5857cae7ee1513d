#include "gansmooth/measures.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

namespace gansmooth {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptySupport: return "EmptySupport";
        case ErrorCode::NegativeWeight: return "NegativeWeight";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::OutsideDomain: return "OutsideDomain";
        case ErrorCode::InvalidDomain: return "InvalidDomain";
        case ErrorCode::UnknownKind: return "UnknownKind";
        case ErrorCode::ProblemTooLarge: return "ProblemTooLarge";
        case ErrorCode::NonZeroMass: return "NonZeroMass";
        case ErrorCode::PointOffSupport: return "PointOffSupport";
        case ErrorCode::GradientUnsupported: return "GradientUnsupported";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::NonPositiveAlpha: return "NonPositiveAlpha";
        case ErrorCode::NonPositiveBeta: return "NonPositiveBeta";
        case ErrorCode::EmptyDomain: return "EmptyDomain";
        case ErrorCode::PreconditionViolated: return "PreconditionViolated";
        case ErrorCode::OrderTooLarge: return "OrderTooLarge";
        case ErrorCode::QuadratureDomainTooSmall: return "QuadratureDomainTooSmall";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NonSmoothActivation: return "NonSmoothActivation";
        case ErrorCode::DegenerateConstants: return "DegenerateConstants";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::MalformedInput: return "MalformedInput";
    }
    return "Unknown";
}

BoxDomain::BoxDomain(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() == 0 || lo.size() != hi.size())
        throw Error(ErrorCode::InvalidDomain, "box corners must have equal positive dimension");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i])) throw Error(ErrorCode::InvalidDomain, "box requires lo < hi");
}

BoxDomain BoxDomain::unit(int dim) {
    return BoxDomain(Vec::Constant(dim, -1.0), Vec::Constant(dim, 1.0));
}

bool BoxDomain::contains(const Eigen::Ref<const Vec>& x, double tol) const {
    if (x.size() != lo.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
    return true;
}

Vec BoxDomain::clamp(const Eigen::Ref<const Vec>& x) const { return x.cwiseMax(lo).cwiseMin(hi); }

namespace {

bool same_atom(const Eigen::Ref<const Vec>& a, const Eigen::Ref<const Vec>& b) {
    return (a - b).cwiseAbs().maxCoeff() <= kMergeTol;
}

// Groups rows of `points` into clusters of coinciding atoms. Returns for each
// row the index of its representative (first occurrence) in output order.
std::vector<int> merge_rows(const Mat& points, std::vector<int>& representatives) {
    const int n = static_cast<int>(points.rows());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return points(a, 0) < points(b, 0); });

    std::vector<int> leader(n, -1);
    for (int s = 0; s < n; ++s) {
        const int i = order[s];
        if (leader[i] >= 0) continue;
        leader[i] = i;
        for (int t = s + 1; t < n; ++t) {
            const int j = order[t];
            if (points(j, 0) - points(i, 0) > kMergeTol) break;
            if (leader[j] < 0 && same_atom(points.row(i).transpose(), points.row(j).transpose()))
                leader[j] = i;
        }
    }
    // Representative of a cluster is its lowest original index.
    std::vector<int> first(n, -1);
    for (int i = 0; i < n; ++i) {
        const int l = leader[i];
        if (first[l] < 0 || i < first[l]) first[l] = i;
    }
    std::vector<int> slot(n, -1);
    representatives.clear();
    std::vector<int> out(n);
    for (int i = 0; i < n; ++i) {
        const int rep = first[leader[i]];
        if (slot[rep] < 0) {
            slot[rep] = static_cast<int>(representatives.size());
            representatives.push_back(rep);
        }
        out[i] = slot[rep];
    }
    return out;
}

}  // namespace

DiscreteMeasure make_discrete(const Mat& points, const Vec& weights, std::optional<BoxDomain> domain) {
    if (points.rows() == 0 || weights.size() == 0)
        throw Error(ErrorCode::EmptySupport, "measure needs at least one atom");
    if (points.rows() != weights.size())
        throw Error(ErrorCode::DimensionMismatch, "points and weights differ in length");
    if (points.cols() == 0) throw Error(ErrorCode::DimensionMismatch, "points have zero dimension");
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (!std::isfinite(weights[i]) || weights[i] < 0.0)
            throw Error(ErrorCode::NegativeWeight, "weights must be finite and nonnegative");
    }
    if (!points.allFinite()) throw Error(ErrorCode::OutsideDomain, "non-finite atom");

    const int dim = static_cast<int>(points.cols());
    BoxDomain box = domain ? *domain : BoxDomain::unit(dim);
    if (domain) {
        if (domain->dim() != dim) throw Error(ErrorCode::DimensionMismatch, "domain dimension");
        for (Eigen::Index i = 0; i < points.rows(); ++i)
            if (!box.contains(points.row(i).transpose()))
                throw Error(ErrorCode::OutsideDomain, "atom outside the declared box");
    } else {
        box.lo = box.lo.cwiseMin(points.colwise().minCoeff().transpose());
        box.hi = box.hi.cwiseMax(points.colwise().maxCoeff().transpose());
    }

    std::vector<int> reps;
    const std::vector<int> slot = merge_rows(points, reps);
    const int m = static_cast<int>(reps.size());
    Mat merged(m, dim);
    Vec w = Vec::Zero(m);
    for (int k = 0; k < m; ++k) merged.row(k) = points.row(reps[k]);
    for (Eigen::Index i = 0; i < weights.size(); ++i) w[slot[i]] += weights[i];

    const double total = w.sum();
    if (!(total > 0.0)) throw Error(ErrorCode::EmptySupport, "total weight is zero");
    // Leave already-normalized weights bit-identical so the constructor is idempotent.
    if (std::abs(total - 1.0) > 8.0 * std::numeric_limits<double>::epsilon() * m) w /= total;
    return DiscreteMeasure(std::move(merged), std::move(w), std::move(box));
}

DiscreteMeasure make_uniform(const Mat& points, std::optional<BoxDomain> domain) {
    const auto n = points.rows();
    return make_discrete(points, Vec::Constant(n, n > 0 ? 1.0 / static_cast<double>(n) : 0.0),
                         std::move(domain));
}

DiscreteMeasure dirac(const Vec& x) {
    Mat p(1, x.size());
    p.row(0) = x.transpose();
    return make_discrete(p, Vec::Ones(1));
}

DiscreteMeasure dirac(double x) { return dirac(Vec::Constant(1, x)); }

SignedMeasure::SignedMeasure(Mat points, Vec weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.rows() != weights_.size())
        throw Error(ErrorCode::DimensionMismatch, "points and weights differ in length");
    total_mass_ = weights_.sum();
}

AlignedWeights align(const Mat& pa, const Vec& wa, const Mat& pb, const Vec& wb) {
    if (pa.cols() != pb.cols()) throw Error(ErrorCode::DimensionMismatch, "measures differ in dimension");
    Mat all(pa.rows() + pb.rows(), pa.cols());
    all << pa, pb;
    std::vector<int> reps;
    const std::vector<int> slot = merge_rows(all, reps);
    const int m = static_cast<int>(reps.size());
    AlignedWeights out{Mat(m, pa.cols()), Vec::Zero(m), Vec::Zero(m)};
    for (int k = 0; k < m; ++k) out.points.row(k) = all.row(reps[k]);
    for (Eigen::Index i = 0; i < pa.rows(); ++i) out.a[slot[i]] += wa[i];
    for (Eigen::Index i = 0; i < pb.rows(); ++i) out.b[slot[pa.rows() + i]] += wb[i];
    return out;
}

SignedMeasure diff(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    auto al = align(mu.points(), mu.weights(), nu.points(), nu.weights());
    return SignedMeasure(std::move(al.points), al.a - al.b);
}

SignedMeasure to_signed(const DiscreteMeasure& mu) { return SignedMeasure(mu.points(), mu.weights()); }

SignedMeasure add(const SignedMeasure& a, const SignedMeasure& b) {
    auto al = align(a.points(), a.weights(), b.points(), b.weights());
    return SignedMeasure(std::move(al.points), al.a + al.b);
}

SignedMeasure scale(const SignedMeasure& a, double c) { return SignedMeasure(a.points(), c * a.weights()); }

namespace {

double cdf_impl(const Mat& points, const Vec& weights, double x) {
    if (points.cols() != 1) throw Error(ErrorCode::DimensionMismatch, "cdf_1d needs a 1-D measure");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        if (points(i, 0) <= x) acc += weights[i];
    return acc;
}

}  // namespace

double cdf_1d(const DiscreteMeasure& m, double x) { return cdf_impl(m.points(), m.weights(), x); }
double cdf_1d(const SignedMeasure& m, double x) { return cdf_impl(m.points(), m.weights(), x); }

TargetKind parse_target_kind(std::string_view name) {
    if (name == "ring") return TargetKind::ring;
    if (name == "gaussian_mixture" || name == "gmm" || name == "mixture") return TargetKind::gaussian_mixture;
    if (name == "grid_uniform" || name == "grid") return TargetKind::grid_uniform;
    throw Error(ErrorCode::UnknownKind, "unknown target kind '" + std::string(name) + "'");
}

std::string_view to_string(TargetKind kind) {
    switch (kind) {
        case TargetKind::ring: return "ring";
        case TargetKind::gaussian_mixture: return "gaussian_mixture";
        case TargetKind::grid_uniform: return "grid_uniform";
    }
    return "unknown";
}

DiscreteMeasure sample_target(TargetKind kind, int n, std::uint64_t seed, int dim) {
    if (n < 1) throw Error(ErrorCode::EmptySupport, "target needs n >= 1");
    if (dim < 1) throw Error(ErrorCode::DimensionMismatch, "target dimension must be positive");
    if (kind != TargetKind::grid_uniform && dim < 2)
        throw Error(ErrorCode::DimensionMismatch, "ring and mixture targets need dim >= 2");
    Rng rng(derive_seed(seed, 0x7461726765ULL));
    Mat pts = Mat::Zero(n, dim);
    switch (kind) {
        case TargetKind::ring:
            for (int i = 0; i < n; ++i) {
                const double t = rng.uniform(0.0, 2.0 * kPi);
                pts(i, 0) = 0.5 * std::cos(t);
                pts(i, 1) = 0.5 * std::sin(t);
            }
            break;
        case TargetKind::gaussian_mixture:
            for (int i = 0; i < n; ++i) {
                const int c = rng.uniform_int(0, 3);
                const double cx = (c & 1) ? 0.5 : -0.5;
                const double cy = (c & 2) ? 0.5 : -0.5;
                pts(i, 0) = std::clamp(cx + 0.1 * rng.normal(), -1.0, 1.0);
                pts(i, 1) = std::clamp(cy + 0.1 * rng.normal(), -1.0, 1.0);
            }
            break;
        case TargetKind::grid_uniform: {
            int side = 1;
            while (std::pow(static_cast<double>(side), dim) < n) ++side;
            for (int i = 0; i < n; ++i) {
                int rem = i;
                for (int k = dim - 1; k >= 0; --k) {
                    pts(i, k) = -1.0 + (2.0 * (rem % side) + 1.0) / side;
                    rem /= side;
                }
            }
            break;
        }
    }
    return make_uniform(pts, BoxDomain::unit(dim));
}

DiscreteMeasure random_measure(Rng& rng, const BoxDomain& domain, int min_atoms, int max_atoms) {
    const int k = rng.uniform_int(min_atoms, max_atoms);
    const int d = domain.dim();
    Mat pts(k, d);
    Vec w(k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < d; ++j) pts(i, j) = rng.uniform(domain.lo[j], domain.hi[j]);
        w[i] = rng.exponential();
    }
    return make_discrete(pts, w / w.sum(), domain);
}

void write_measure_csv(std::ostream& os, const DiscreteMeasure& m) {
    const int d = m.dim();
    for (int j = 0; j < d; ++j) os << "x_" << (j + 1) << ',';
    os << "w\n";
    os << std::setprecision(17);
    for (int i = 0; i < m.size(); ++i) {
        for (int j = 0; j < d; ++j) os << m.points()(i, j) << ',';
        os << m.weights()[i] << '\n';
    }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    return cells;
}

}  // namespace

DiscreteMeasure read_measure_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorCode::MalformedInput, "measure CSV is empty");
    const auto header = split_csv(line);
    if (header.size() < 2 || header.back() != "w")
        throw Error(ErrorCode::MalformedInput, "measure CSV header must be x_1,..,x_d,w");
    const int d = static_cast<int>(header.size()) - 1;
    std::vector<double> coords;
    std::vector<double> ws;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv(line);
        if (static_cast<int>(cells.size()) != d + 1)
            throw Error(ErrorCode::MalformedInput, "row has wrong number of columns: " + line);
        try {
            for (int j = 0; j < d; ++j) coords.push_back(std::stod(cells[j]));
            ws.push_back(std::stod(cells[d]));
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::MalformedInput, "unparsable number in row: " + line);
        }
    }
    const auto n = static_cast<Eigen::Index>(ws.size());
    Mat pts(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) pts(i, j) = coords[i * d + j];
    return make_discrete(pts, Eigen::Map<const Vec>(ws.data(), n));
}

DiscreteMeasure read_measure_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MalformedInput, "cannot open " + path);
    return read_measure_csv(in);
}

}  // namespace gansmooth
