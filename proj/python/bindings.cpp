#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "leeisd/asymptotics.hpp"
#include "leeisd/bench.hpp"
#include "leeisd/isd_engine.hpp"
#include "leeisd/weight_model.hpp"

namespace py = pybind11;
using namespace leeisd;

namespace {

// Exact counts cross the boundary as Python ints.
py::int_ to_py(const ExactCount& x) {
    return py::reinterpret_steal<py::int_>(PyLong_FromString(x.get_str().c_str(), nullptr, 10));
}

std::vector<std::vector<Elem>> matrix_rows(const Matrix& m) {
    std::vector<std::vector<Elem>> out(m.rows(), std::vector<Elem>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

Matrix matrix_from(const std::vector<std::vector<Elem>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) throw InvalidArgument("ragged matrix");
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

py::dict cost_dict(const asym::RatePoint& p) {
    py::dict d;
    d["R"] = p.R;
    d["T"] = p.T;
    d["found"] = p.opt.found;
    if (!p.opt.found) return d;
    const auto& x = p.opt.params;
    const auto& c = p.opt.cost;
    d["L"] = x.L, d["V"] = x.V, d["E"] = x.E, d["r"] = x.r, d["U"] = x.U;
    d["I"] = c.I, d["B"] = c.B, d["D"] = c.D, d["C"] = c.C;
    d["total"] = c.total, d["memory"] = c.memory, d["quantum"] = c.quantum;
    d["capped"] = c.baseline_capped;
    return d;
}

asym::OptimizerConfig optimizer_config(bool amortized, std::optional<std::uint32_t> r, int starts) {
    asym::OptimizerConfig cfg;
    cfg.cost.amortized = amortized;
    cfg.fixed_r = r;
    cfg.starts = starts;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_leeisd, m) {
    m.doc() = "Lee-metric syndrome decoding workbench";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "Error");
    py::register_exception<BudgetExhausted>(m, "BudgetExhausted");

    py::class_<RingSpec>(m, "Ring")
        .def(py::init<std::uint32_t, std::uint32_t>(), py::arg("p"), py::arg("s") = 1)
        .def_static("from_modulus", &RingSpec::from_modulus)
        .def_property_readonly("p", &RingSpec::p)
        .def_property_readonly("s", &RingSpec::s)
        .def_property_readonly("q", &RingSpec::q)
        .def_property_readonly("M", &RingSpec::M)
        .def("lee_weight", &RingSpec::lee_weight)
        .def("__repr__", [](const RingSpec& r) { return "Ring(q=" + std::to_string(r.q()) + ")"; });

    m.def("count_sphere", [](std::uint64_t t, std::size_t n, const RingSpec& r) { return to_py(count_sphere(t, n, r)); });
    m.def("count_ball", [](std::uint64_t t, std::size_t n, const RingSpec& r) { return to_py(count_ball(t, n, r)); });
    m.def(
        "count_sphere_restricted",
        [](std::uint64_t t, std::size_t n, const RingSpec& r, std::uint32_t rmin, std::uint32_t rmax) {
            return to_py(count_sphere_restricted(t, n, r, rmin, rmax));
        },
        py::arg("t"), py::arg("n"), py::arg("ring"), py::arg("rmin"), py::arg("rmax"));
    m.def(
        "sample_sphere",
        [](std::uint64_t t, std::size_t n, const RingSpec& r, std::uint64_t seed) {
            Rng rng(seed);
            return sample_sphere(t, n, r, rng).entries();
        },
        py::arg("t"), py::arg("n"), py::arg("ring"), py::arg("seed"));
    m.def("lee_weight", [](const std::vector<Elem>& v, const RingSpec& r) { return lee_weight(v, r); });

    m.def("solve_beta", &solve_beta, py::arg("T"), py::arg("ring"));
    m.def("marginal", [](double beta, const RingSpec& r) { return marginal(beta, r).elem_prob; });

    py::class_<SdpInstance>(m, "Instance")
        .def_property_readonly("ring", [](const SdpInstance& i) { return i.ring; })
        .def_readonly("n", &SdpInstance::n)
        .def_readonly("k", &SdpInstance::k)
        .def_readonly("t", &SdpInstance::t)
        .def_readonly("s", &SdpInstance::s)
        .def_property_readonly("H", [](const SdpInstance& i) { return matrix_rows(i.H); })
        .def_static(
            "from_arrays",
            [](const RingSpec& r, const std::vector<std::vector<Elem>>& H, const std::vector<Elem>& s,
               std::uint64_t t) {
                SdpInstance inst{r, H.empty() ? 0 : H[0].size(), 0, matrix_from(H), s, t};
                inst.k = inst.n - H.size();
                inst.validate();
                return inst;
            },
            py::arg("ring"), py::arg("H"), py::arg("s"), py::arg("t"));

    m.def(
        "random_instance",
        [](std::size_t n, std::size_t k, std::uint64_t t, const RingSpec& r, std::uint64_t seed) {
            Rng rng(seed);
            auto p = random_instance(n, k, t, r, rng);
            return py::make_tuple(p.instance, p.planted.entries());
        },
        py::arg("n"), py::arg("k"), py::arg("t"), py::arg("ring"), py::arg("seed"),
        "Planted instance; returns (instance, planted solution).");
    m.def("gv_weight", &gv_weight, py::arg("n"), py::arg("k"), py::arg("ring"));
    m.def("verify", [](const SdpInstance& i, const std::vector<Elem>& e) { return verify_solution(i, e); });

    m.def(
        "solve",
        [](const SdpInstance& inst, std::uint64_t seed, std::optional<std::string> mode, std::uint64_t budget) {
            const Mode md = mode ? asym::mode_from_string(*mode) : natural_mode(inst);
            SolverParams params = default_params(inst, md);
            params.max_iters = budget;
            Rng rng(seed);
            SolutionReport rep;
            {
                py::gil_scoped_release release;
                rep = solve(inst, params, rng);
            }
            py::dict d;
            d["solution"] = rep.solution;
            d["iterations"] = rep.iterations;
            d["pge_failures"] = rep.pge_failures;
            d["lists_peak"] = rep.lists_peak;
            d["wall_seconds"] = rep.wall_time.count();
            d["params"] = params.describe();
            return d;
        },
        py::arg("instance"), py::arg("seed"), py::arg("mode") = py::none(), py::arg("budget") = 0,
        "Heuristic parameters; raises BudgetExhausted when the iteration budget runs out.");

    m.def(
        "optimize_at_rate",
        [](double R, const RingSpec& r, const std::string& mode, bool amortized, std::optional<std::uint32_t> fixed_r,
           int starts) {
            return cost_dict(asym::optimize_at_rate(R, r, asym::mode_from_string(mode),
                                                    optimizer_config(amortized, fixed_r, starts)));
        },
        py::arg("R"), py::arg("ring"), py::arg("mode") = "below", py::arg("amortized") = false,
        py::arg("r") = py::none(), py::arg("starts") = 64);
    m.def(
        "worst_rate",
        [](const RingSpec& r, const std::string& mode, bool amortized, std::optional<std::uint32_t> fixed_r, int starts,
           double step) {
            asym::WorstRateConfig cfg;
            cfg.optimizer = optimizer_config(amortized, fixed_r, starts);
            cfg.step = step;
            asym::WorstRate w;
            {
                py::gil_scoped_release release;
                w = asym::worst_rate(r, asym::mode_from_string(mode), cfg);
            }
            return py::make_tuple(w.R_star, w.exponent);
        },
        py::arg("ring"), py::arg("mode") = "below", py::arg("amortized") = false, py::arg("r") = py::none(),
        py::arg("starts") = 16, py::arg("step") = 0.02);
    m.def("sphere_exponent", py::overload_cast<double, const RingSpec&>(&asym::sphere_exponent));
    m.def("gv_relative_weight", &asym::gv_relative_weight);
}
