#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>

#include "gspt/blowup.hpp"
#include "gspt/cycle.hpp"
#include "gspt/errors.hpp"
#include "gspt/model.hpp"
#include "gspt/scaling.hpp"
#include "gspt/simulate.hpp"
#include "gspt/singular.hpp"

namespace py = pybind11;
using namespace gspt;

namespace {

using P2 = std::array<double, 2>;

Vec2 v(const P2& p) { return {p[0], p[1]}; }
P2 p(const Vec2& z) { return {z.x, z.y}; }

py::array_t<double> points(const std::vector<Vec2>& pts) {
  py::array_t<double> a({static_cast<py::ssize_t>(pts.size()), static_cast<py::ssize_t>(2)});
  auto r = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    r(i, 0) = pts[i].x;
    r(i, 1) = pts[i].y;
  }
  return a;
}

std::optional<Window> window_arg(const std::optional<std::array<double, 4>>& w) {
  if (!w) return std::nullopt;
  return Window{(*w)[0], (*w)[1], (*w)[2], (*w)[3]};
}

py::dict contact_dict(const ContactPoint& c) {
  py::dict d;
  d["location"] = p(c.location);
  d["order"] = c.order;
  d["regular"] = c.regular;
  d["jump"] = to_string(c.jump_class);
  return d;
}

SeedStrategy seed_of(const std::string& s) {
  if (s == "automatic") return SeedStrategy::automatic;
  if (s == "singular_cycle") return SeedStrategy::singular_cycle;
  if (s == "equilibrium") return SeedStrategy::equilibrium;
  throw PreconditionError("seed must be automatic, singular_cycle or equilibrium");
}

ModelSpec transition_with(Params base, double v0, double delta) {
  base["v0"] = v0;
  base["delta"] = delta;
  return builtin_model("transition", base);
}

}  // namespace

PYBIND11_MODULE(_gspt, m) {
  m.doc() = "Singular-perturbation toolbox for planar slow-fast systems z' = N f + eps G";

  // base first: pybind11 tries the most recently registered translator first
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());
  py::register_exception<DegeneracyError>(m, "DegeneracyError", base.ptr());
  py::register_exception<StepSizeError>(m, "StepSizeError", base.ptr());
  py::register_exception<AssumptionFailure>(m, "AssumptionFailure", base.ptr());

  py::class_<ModelSpec>(m, "Model")
      .def(py::init([](const std::string& name, const Params& params) { return builtin_model_with_defaults(name, params); }),
           py::arg("name"), py::arg("params") = Params{}, "Zoo model; params override the defaults")
      .def_readonly("name", &ModelSpec::name)
      .def_readonly("params", &ModelSpec::params)
      .def_property_readonly("window",
                             [](const ModelSpec& s) {
                               return std::array<double, 4>{s.window.x_min, s.window.x_max, s.window.y_min, s.window.y_max};
                             })
      .def("rhs", [](const ModelSpec& s, const P2& z, double eps) { return p(eval_rhs(s, v(z), eps)); }, py::arg("z"),
           py::arg("eps"))
      .def("f", [](const ModelSpec& s, const P2& z) { return s.f(v(z)); })
      .def("N", [](const ModelSpec& s, const P2& z) { return p(s.N(v(z))); })
      .def("G", [](const ModelSpec& s, const P2& z, double eps) { return p(s.G(v(z), eps)); }, py::arg("z"),
           py::arg("eps") = 0.0)
      .def("eigenvalue", [](const ModelSpec& s, const P2& z) { return nontrivial_eigenvalue(s, v(z)); })
      .def("reduced", [](const ModelSpec& s, const P2& z) { return p(reduced_rhs(s, v(z))); })
      .def("desingularised", [](const ModelSpec& s, const P2& z) { return p(desingularised_rhs(s, v(z))); })
      .def("projection",
           [](const ModelSpec& s, const P2& z) {
             const Mat2 P = projection(s, v(z));
             return std::array<std::array<double, 2>, 2>{{{P.a, P.b}, {P.c, P.d}}};
           })
      .def("__repr__", [](const ModelSpec& s) { return "<gspt.Model '" + s.name + "'>"; });

  m.def("list_models", [] {
    py::list out;
    for (const auto& info : model_catalog()) {
      py::dict d;
      d["name"] = info.name;
      d["required"] = info.required;
      d["description"] = info.description;
      out.append(d);
    }
    return out;
  });
  m.def("default_params", &default_params, py::arg("name"));

  m.def(
      "critical_curve",
      [](const ModelSpec& s, std::optional<std::array<double, 4>> w, int resolution) {
        const CriticalCurve c = trace_critical_curve(s, window_arg(w).value_or(s.window), resolution);
        py::list out;
        for (const auto& b : c.branches) {
          std::vector<Vec2> pts;
          for (const auto& q : b.samples) pts.push_back(q.z);
          py::dict d;
          d["points"] = points(pts);
          d["stability"] = to_string(b.stability);
          out.append(d);
        }
        return out;
      },
      py::arg("model"), py::arg("window") = py::none(), py::arg("resolution") = 256);

  m.def(
      "contact_points",
      [](const ModelSpec& s, std::optional<std::array<double, 4>> w, int resolution) {
        py::list out;
        for (const auto& c : find_contact_points(s, trace_critical_curve(s, window_arg(w).value_or(s.window), resolution)))
          out.append(contact_dict(c));
        return out;
      },
      py::arg("model"), py::arg("window") = py::none(), py::arg("resolution") = 256);

  m.def(
      "n_singularities",
      [](const ModelSpec& s, std::optional<std::array<double, 4>> w) {
        py::list out;
        for (const auto& q : find_N_singularities(s, window_arg(w).value_or(s.window))) {
          py::dict d;
          d["location"] = p(q.location);
          d["trace"] = q.trace;
          d["det"] = q.det;
          d["kind"] = to_string(q.kind);
          out.append(d);
        }
        return out;
      },
      py::arg("model"), py::arg("window") = py::none());

  m.def(
      "singular_cycle",
      [](const ModelSpec& s, std::optional<std::array<double, 4>> w) {
        const SingularCycle c = build_singular_cycle(s, window_arg(w));
        py::dict d;
        d["F"] = contact_dict(c.F);
        d["L_F"] = p(c.L_F);
        d["polyline"] = points(c.polyline());
        d["reduced_time"] = c.reduced_arc.reduced_time;
        d["repelling"] = c.repelling;
        d["assumptions"] = c.assumptions_report.summary();
        return d;
      },
      py::arg("model"), py::arg("window") = py::none());

  m.def(
      "limit_cycle",
      [](const ModelSpec& s, double eps, const std::string& seed, double tol) {
        CycleOptions o;
        o.seed = seed_of(seed);
        o.tol = tol;
        LimitCycle lc;
        {
          py::gil_scoped_release release;
          lc = find_limit_cycle(s, eps, o);
        }
        py::dict d;
        d["eps"] = lc.eps;
        d["samples"] = points(lc.samples);
        d["period_desing"] = lc.period_desing;
        d["period_physical"] = lc.period_physical;
        d["floquet_exponent"] = lc.floquet_exponent;
        d["log_multiplier"] = lc.log_multiplier;
        d["strokes"] = lc.strokes;
        d["attracting"] = lc.attracting;
        d["seed"] = lc.seed;
        return d;
      },
      py::arg("model"), py::arg("eps"), py::arg("seed") = "automatic", py::arg("tol") = 1e-10);

  m.def(
      "section_offsets",
      [](const ModelSpec& s, double eps, std::optional<double> rho) {
        const SectionOffsets o = section_offsets(s, eps, rho);
        py::dict d;
        d["y_s"] = o.y_s;
        d["y_l"] = o.y_l;
        d["rho"] = o.rho;
        d["offset"] = o.offset();
        return d;
      },
      py::arg("model"), py::arg("eps"), py::arg("rho") = py::none());

  m.def(
      "scaling_report",
      [](const ModelSpec& s, std::vector<double> eps, std::optional<double> rho, bool cycles) {
        ScalingOptions o;
        o.rho = rho;
        o.cycles = cycles;
        ScalingReport r;
        {
          py::gil_scoped_release release;
          r = epsilon_scaling_report(s, std::move(eps), o);
        }
        auto fit = [](const LogLogFit& f) {
          py::dict d;
          d["slope"] = f.slope;
          d["intercept"] = f.intercept;
          d["half_width"] = f.half_width;
          d["n"] = f.n;
          return d;
        };
        py::dict d;
        d["eps"] = r.eps_values;
        d["offsets"] = r.offsets;
        d["floquet"] = r.floquet;
        d["hausdorff"] = r.hausdorff;
        d["slow_distance"] = r.slow_dist;
        d["notes"] = r.notes;
        d["rho"] = r.rho;
        d["offset_fit"] = fit(r.offset_fit);
        d["floquet_fit"] = fit(r.floquet_fit);
        d["slow_fit"] = fit(r.slow_fit);
        d["hausdorff_decreasing"] = r.hausdorff_decreasing;
        return d;
      },
      py::arg("model"), py::arg("eps"), py::arg("rho") = py::none(), py::arg("cycles") = true);

  const Params regime_base{{"mu_s", 1.0}, {"a1", 0.75}, {"a3", 0.25}};
  m.def(
      "classify_regime",
      [](double v0, double eps, double delta, const Params& params) {
        double dwell = 0.0, trace = 0.0;
        const Regime r = classify_regime(transition_with(params, v0, delta), eps, &dwell, &trace);
        return py::make_tuple(to_string(r), dwell, trace);
      },
      py::arg("v0"), py::arg("eps") = 1e-3, py::arg("delta") = 1.0, py::arg("params") = regime_base,
      "(label, dwell fraction, equilibrium trace) for the transition model");

  m.def(
      "regime_sweep",
      [](const std::vector<double>& v0, double eps, double delta, const Params& params) {
        RegimeOptions o;
        o.eps = eps;
        o.delta = delta;
        RegimeMap r;
        {
          py::gil_scoped_release release;
          r = stickslip_regime_sweep(params, v0, o);
        }
        py::dict d;
        std::vector<std::string> labels;
        for (Regime g : r.labels) labels.push_back(to_string(g));
        d["v0"] = r.v0_values;
        d["labels"] = labels;
        d["dwell"] = r.dwell;
        d["v_m_detected"] = r.v_m_detected;
        d["v_m_analytic"] = r.v_m_analytic;
        if (r.v_ss) d["v_ss"] = py::make_tuple(r.v_ss->first, r.v_ss->second);
        else d["v_ss"] = py::none();
        return d;
      },
      py::arg("v0"), py::arg("eps") = 1e-3, py::arg("delta") = 1.0, py::arg("params") = regime_base);

  m.def(
      "stroke_phase_diagram",
      [](const std::vector<double>& eps, const std::vector<double>& delta, std::optional<Params> params) {
        RegimeMap r;
        {
          py::gil_scoped_release release;
          r = stroke_phase_diagram(eps, delta, params.value_or(default_params("transition")));
        }
        py::array_t<int> a({static_cast<py::ssize_t>(eps.size()), static_cast<py::ssize_t>(delta.size())});
        auto w = a.mutable_unchecked<2>();
        for (std::size_t i = 0; i < eps.size(); ++i)
          for (std::size_t j = 0; j < delta.size(); ++j) w(i, j) = r.strokes[i * delta.size() + j];
        return a;
      },
      py::arg("eps"), py::arg("delta"), py::arg("params") = py::none(), "strokes[i, j] at (eps[i], delta[j])");

  m.def("omega0", &omega0_constant, py::arg("scan_step") = 0.01);
  m.def("airy_first_zero", &airy_first_zero_series);

  m.def(
      "riccati_special_solution",
      [](double a0, double b1, double d0, const std::vector<double>& grid) {
        const RiccatiProblem prob = RiccatiProblem::from(ExpansionCoeffs{a0, b1, d0, 0.0});
        return riccati_special_solution(prob, grid).zeta;
      },
      py::arg("a0"), py::arg("b1"), py::arg("d0"), py::arg("grid"));

  m.def(
      "riccati_tails",
      [](double a0, double b1, double d0) {
        const RiccatiProblem prob = RiccatiProblem::from(ExpansionCoeffs{a0, b1, d0, 0.0});
        const TailFit l = left_tail_fit(prob), r = right_tail_fit(prob);
        py::dict d;
        d["left_exponent"] = l.exponent;
        d["right_constant"] = r.constant;
        d["right_predicted"] = r.predicted;
        return d;
      },
      py::arg("a0") = 1.0, py::arg("b1") = 1.0, py::arg("d0") = 1.0);
}
