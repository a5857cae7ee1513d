#include "gansmooth/divergences.hpp"
#include "gansmooth/envelopes.hpp"
#include "gansmooth/rkhs.hpp"
#include "gansmooth/smoothness.hpp"
#include "gansmooth/trainer.hpp"
#include "gansmooth/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace gansmooth;

namespace {

KernelSpec kernel_of(std::optional<double> sigma_sq) {
    return sigma_sq ? KernelSpec(*sigma_sq) : KernelSpec::critical();
}

GridFn grid1(const Vec& values, double lo, double step) {
    const double hi = lo + step * static_cast<double>(values.size() - 1);
    return GridFn(BoxDomain(Vec::Constant(1, lo), Vec::Constant(1, hi)), step, values);
}

py::dict estimate_dict(const Estimate& e) {
    py::dict d;
    d["value"] = e.value;
    d["saturated"] = e.saturated;
    d["samples"] = e.samples;
    return d;
}

}  // namespace

PYBIND11_MODULE(_gansmooth, m) {
    m.doc() = "Smoothness laboratory for GAN losses";
    py::register_exception<Error>(m, "GansmoothError", PyExc_ValueError);

    py::class_<DiscreteMeasure>(m, "Measure")
        .def(py::init([](const Mat& points, const Vec& weights) { return make_discrete(points, weights); }),
             py::arg("points"), py::arg("weights"))
        .def_property_readonly("points", &DiscreteMeasure::points)
        .def_property_readonly("weights", &DiscreteMeasure::weights)
        .def_property_readonly("dim", &DiscreteMeasure::dim)
        .def("__len__", &DiscreteMeasure::size);

    m.def("sample_target", [](const std::string& kind, int n, std::uint64_t seed, int dim) {
        return sample_target(parse_target_kind(kind), n, seed, dim);
    }, py::arg("kind"), py::arg("n"), py::arg("seed") = 0, py::arg("dim") = 2);

    m.def("mmd_sq", [](const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::optional<double> sigma_sq) {
        return mmd_sq(mu, nu, kernel_of(sigma_sq));
    }, py::arg("mu"), py::arg("nu"), py::arg("sigma_sq") = py::none());
    m.def("w1", &w1, py::arg("mu"), py::arg("nu"));
    m.def("kl", &kl, py::arg("mu"), py::arg("nu"));
    m.def("js", &js, py::arg("mu"), py::arg("mu0"));
    m.def("ns_kl", &ns_kl, py::arg("mu"), py::arg("mu0"));

    m.def("phi_mmd", [](const DiscreteMeasure& mu, const DiscreteMeasure& mu0, const Vec& x) {
        return phi_mmd(mu, mu0, KernelSpec::critical(), x);
    }, py::arg("mu"), py::arg("mu0"), py::arg("x"));
    m.def("grad_phi_mmd", [](const DiscreteMeasure& mu, const DiscreteMeasure& mu0, const Vec& x) {
        return grad_phi_mmd(mu, mu0, KernelSpec::critical(), x);
    }, py::arg("mu"), py::arg("mu0"), py::arg("x"));

    m.def("smoothness_report", [](const std::string& loss, int dim, int trials, std::uint64_t seed, int grid) {
        const SmoothnessReport r = smoothness_report(parse_loss_tag(loss), dim, trials, seed, KernelSpec::critical(), grid);
        py::dict d;
        d["alpha"] = estimate_dict(r.alpha);
        d["beta1"] = estimate_dict(r.beta1);
        d["beta2"] = estimate_dict(r.beta2);
        return d;
    }, py::arg("loss"), py::arg("dim") = 1, py::arg("trials") = 100, py::arg("seed") = 7, py::arg("grid") = 101);

    // 1-D grid functions: values on lo, lo + step, ...
    m.def("moreau", [](const Vec& v, double lo, double step, double beta) {
        return moreau(grid1(v, lo, step), beta).values();
    }, py::arg("values"), py::arg("lo"), py::arg("step"), py::arg("beta"));
    m.def("pasch_hausdorff", [](const Vec& v, double lo, double step, double alpha) {
        return pasch_hausdorff(grid1(v, lo, step), alpha).values();
    }, py::arg("values"), py::arg("lo"), py::arg("step"), py::arg("alpha"));
    m.def("inf_conv", [](const Vec& f, const Vec& g, double lo, double step) {
        return inf_conv(grid1(f, lo, step), grid1(g, lo, step)).values();
    }, py::arg("f"), py::arg("g"), py::arg("lo"), py::arg("step"));
    m.def("legendre", [](const Vec& v, double lo, double step) {
        return legendre(grid1(v, lo, step)).values();
    }, py::arg("values"), py::arg("lo"), py::arg("step"));

    m.def("truncated_series_norm", [](const Vec& centers, const Vec& coeffs, int order) {
        return truncated_series_norm(EmbeddingFn{centers, coeffs, KernelSpec::critical()}, order);
    }, py::arg("centers"), py::arg("coeffs"), py::arg("order") = 20);

    m.def("theoretical_lr", &theoretical_lr, py::arg("a"), py::arg("b"), py::arg("alpha"), py::arg("beta1"),
          py::arg("beta2"));
    m.def("train_particles", [](const DiscreteMeasure& target, int n, double lr_ratio, int steps, std::uint64_t seed) {
        TrainConfig cfg;
        cfg.target = target;
        cfg.n_particles = n;
        cfg.lr_ratio = lr_ratio;
        cfg.n_steps = steps;
        cfg.seed = seed;
        const TrainTrace tr = train_particles(cfg);
        Vec loss(tr.steps.size()), grad(tr.steps.size());
        for (std::size_t i = 0; i < tr.steps.size(); ++i) {
            loss[i] = tr.steps[i].loss;
            grad[i] = tr.steps[i].grad_norm;
        }
        py::dict d;
        d["loss"] = loss;
        d["grad_norm"] = grad;
        d["final_loss"] = tr.final_loss;
        d["lipschitz_l"] = tr.lipschitz_l;
        d["diverged"] = tr.diverged;
        return d;
    }, py::arg("target"), py::arg("n") = 64, py::arg("lr_ratio") = 1.0, py::arg("steps") = 1000,
       py::arg("seed") = 0);

    m.def("verify", [](const std::string& suite, std::uint64_t seed) {
        verify::Options opts;
        opts.seed = seed;
        py::list out;
        for (const auto& c : verify::run_suite(suite, opts)) {
            py::dict d;
            d["id"] = c.id;
            d["name"] = c.name;
            d["pass"] = c.pass;
            d["observed"] = c.observed;
            d["bound"] = c.bound;
            out.append(d);
        }
        return out;
    }, py::arg("suite"), py::arg("seed") = 7);
}
