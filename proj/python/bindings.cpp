#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "kintegra/expr.hpp"
#include "kintegra/fields.hpp"
#include "kintegra/killing.hpp"
#include "kintegra/metric.hpp"
#include "kintegra/nijenhuis.hpp"
#include "kintegra/rng.hpp"
#include "kintegra/tensor.hpp"
#include "kintegra/theorem.hpp"

namespace py = pybind11;
using namespace kintegra;

namespace {

py::array_t<double> as_array(const DenseTensor& t) {
  std::vector<py::ssize_t> shape(static_cast<std::size_t>(t.order()), t.dim());
  py::array_t<double> a(shape);
  std::copy(t.components().begin(), t.components().end(), a.mutable_data());
  return a;
}

ChartPoint checked_point(const MetricField& m, std::vector<double> coords) {
  ChartPoint p = m.point(std::move(coords));
  if (!p.admissible) throw py::value_error("point is outside the chart domain");
  return p;
}

// Owns a symmetric tensor field together with the space it lives on, so every
// pointwise operation needs only coordinates.
struct Field {
  std::shared_ptr<const SymmetricTensorField> impl;
  const SymmetricTensorField& get() const { return *impl; }
  const MetricField& space() const { return impl->space(); }
};

std::vector<std::vector<Expr>> parse_rows(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::vector<Expr>> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<Expr> r;
    r.reserve(row.size());
    for (const auto& s : row) r.push_back(Expr::parse(s));
    out.push_back(std::move(r));
  }
  return out;
}

py::dict report_dict(const TheoremReport& r) {
  py::dict d;
  d["dim"] = r.dim;
  d["pattern"] = r.pattern.str();
  d["trials"] = r.trials;
  d["seed"] = r.seed;
  d["tolerance"] = r.tolerance;
  d["max_k3_residual"] = r.max_k3_residual;
  d["constraint_dims"] = py::make_tuple(r.constraint_dims[0], r.constraint_dims[1],
                                        r.constraint_dims[2], r.constraint_dims[3]);
  d["elapsed_seconds"] = r.elapsed_seconds;
  d["verified"] = r.verified;
  return d;
}

}  // namespace

PYBIND11_MODULE(_kintegra, m) {
  m.doc() = "killing tensors, nijenhuis torsion, and integrability conditions";

  py::class_<MetricField>(m, "Space",
                          "metric tensor field on a single coordinate chart")
      .def_static("euclidean", &MetricField::euclidean, py::arg("dim"))
      .def_static(
          "minkowski",
          [](int plus, int minus) { return MetricField::minkowski({plus, minus}); },
          py::arg("plus"), py::arg("minus") = 1)
      .def_static("sphere", &MetricField::sphere_stereographic, py::arg("dim"),
                  py::arg("radius") = 1.0)
      .def_static("hyperbolic", &MetricField::hyperbolic_ball, py::arg("dim"),
                  py::arg("radius") = 1.0)
      .def_static(
          "from_expressions",
          [](int dim, const std::vector<std::vector<std::string>>& upper) {
            return MetricField::expression(dim, parse_rows(upper));
          },
          py::arg("dim"), py::arg("upper"),
          "expression metric from upper-triangle rows of formulas in x1..xn")
      .def_static(
          "from_text", [](const std::string& text) { return MetricField::from_text(text); },
          py::arg("text"))
      .def_static("from_file", &MetricField::from_file, py::arg("path"))
      .def_property_readonly("dim", &MetricField::dim)
      .def_property_readonly("signature",
                             [](const MetricField& s) {
                               return py::make_tuple(s.signature().plus, s.signature().minus);
                             })
      .def("admissible",
           [](const MetricField& s, const std::vector<double>& x) {
             return s.admissible(x);
           },
           py::arg("coords"))
      .def(
          "metric",
          [](const MetricField& s, std::vector<double> x) {
            return as_array(s.metric_at(checked_point(s, std::move(x))));
          },
          py::arg("coords"))
      .def(
          "inverse_metric",
          [](const MetricField& s, std::vector<double> x) {
            return as_array(s.inverse_metric_at(checked_point(s, std::move(x))));
          },
          py::arg("coords"))
      .def(
          "christoffel",
          [](const MetricField& s, std::vector<double> x) {
            return as_array(s.christoffel_at(checked_point(s, std::move(x))));
          },
          py::arg("coords"), "connection coefficients, slot order (a, b, c) for Gamma^a_bc")
      .def(
          "random_point",
          [](const MetricField& s, std::uint64_t seed) {
            PhiloxRng rng(seed);
            return random_admissible_point(s, rng);
          },
          py::arg("seed"))
      .def("__repr__", [](const MetricField& s) {
        return "<Space dim=" + std::to_string(s.dim()) + " signature=(" +
               std::to_string(s.signature().plus) + "," + std::to_string(s.signature().minus) +
               ")>";
      });

  py::class_<Field>(m, "Field", "symmetric 2-tensor field on a Space")
      .def_property_readonly("space", [](const Field& f) { return f.space(); })
      .def(
          "value",
          [](const Field& f, std::vector<double> x) {
            return as_array(f.get().value_at(checked_point(f.space(), std::move(x))));
          },
          py::arg("coords"))
      .def(
          "covariant_derivative",
          [](const Field& f, std::vector<double> x) {
            return as_array(covariant_derivative_sym2(
                f.get(), f.space(), checked_point(f.space(), std::move(x))));
          },
          py::arg("coords"), "nabla_c K_ab with slot order (a, b, c)")
      .def(
          "killing_residual",
          [](const Field& f, std::vector<double> x) {
            return killing_residual_relative(f.get(), f.space(),
                                             checked_point(f.space(), std::move(x)));
          },
          py::arg("coords"),
          "max-abs cyclic sum of the covariant derivative, relative to its norm")
      .def(
          "torsion",
          [](const Field& f, std::vector<double> x) {
            return as_array(
                torsion_at(f.get(), f.space(), checked_point(f.space(), std::move(x))));
          },
          py::arg("coords"), "half-normalized torsion of g^{-1}K, slots (a, b, c) for N^a_bc")
      .def(
          "haantjes",
          [](const Field& f, std::vector<double> x) {
            return as_array(
                haantjes_at(f.get(), f.space(), checked_point(f.space(), std::move(x))));
          },
          py::arg("coords"))
      .def(
          "conditions",
          [](const Field& f, std::vector<double> x, double tol) {
            const ConditionResiduals cr = condition_residuals(
                f.get(), f.space(), checked_point(f.space(), std::move(x)), tol);
            py::dict d;
            d["residuals"] = py::make_tuple(cr.rel[0], cr.rel[1], cr.rel[2]);
            d["verdicts"] = py::make_tuple(cr.verdict[0], cr.verdict[1], cr.verdict[2]);
            d["tolerance"] = cr.tol;
            return d;
          },
          py::arg("coords"), py::arg("tolerance") = 1e-8,
          "relative residuals and pass/fail verdicts of the three integrability conditions");

  m.def(
      "metric_field",
      [](const MetricField& s) {
        return Field{std::make_shared<MetricTensorField>(s)};
      },
      py::arg("space"), "the metric itself as a (parallel) symmetric field");
  m.def(
      "field_from_text",
      [](const MetricField& s, const std::string& text) {
        return Field{std::make_shared<KillingTensorField>(killing_field_from_text(s, text))};
      },
      py::arg("space"), py::arg("text"),
      "killing tensor from 'term <coeff> <gen> <gen>' lines");
  m.def(
      "expression_field",
      [](const MetricField& s, const std::vector<std::vector<std::string>>& upper) {
        return Field{std::make_shared<ExprSymmetricField>(s, parse_rows(upper))};
      },
      py::arg("space"), py::arg("upper"),
      "symmetric field from upper-triangle component formulas in x1..xn");
  m.def(
      "killing_basis",
      [](const MetricField& s) {
        std::vector<Field> out;
        for (KillingTensorField& k : killing_basis(s))
          out.push_back(Field{std::make_shared<KillingTensorField>(std::move(k))});
        return out;
      },
      py::arg("space"),
      "symmetrized products of the isometry generators: a spanning set of "
      "second-order killing tensors on the built-in constant-curvature spaces");
  m.def(
      "generator_names",
      [](const MetricField& s) {
        std::vector<std::string> names;
        for (const KillingVector& v : killing_generators(s)) names.push_back(v.name());
        return names;
      },
      py::arg("space"));

  m.def(
      "verify_redundancy",
      [](int dim, const std::string& pattern, long trials, std::uint64_t seed,
         double tolerance) {
        const MultiplicityPattern p =
            pattern.empty() ? MultiplicityPattern::distinct(dim) : MultiplicityPattern::parse(pattern);
        return report_dict(verify_redundancy(dim, p, trials, seed, tolerance));
      },
      py::arg("dim"), py::arg("pattern") = "", py::arg("trials") = 1000, py::arg("seed") = 7,
      py::arg("tolerance") = 1e-9,
      "sample random pointwise solutions of the first three conditions and "
      "confirm the cubic condition follows");
  m.def(
      "independence_witness",
      [](int dim, const Eigen::VectorXd& lambda, std::uint64_t seed) -> py::object {
        const auto w = independence_witness(dim, lambda, seed);
        if (!w) return py::none();
        py::dict d;
        d["lambda"] = w->lambda;
        d["s"] = as_array(w->s);
        d["k2_residual"] = w->k2_residual;
        d["nullspace_dim_k0k1"] = w->dim_k0k1;
        d["nullspace_dim_k0k1k2"] = w->dim_k0k1k2;
        return d;
      },
      py::arg("dim"), py::arg("eigenvalues"), py::arg("seed") = 7,
      "element showing the quadratic condition is not implied by the linear ones");
  m.def(
      "nullspace_dims",
      [](const Eigen::VectorXd& lambda) {
        static constexpr KCondition all[] = {KCondition::K0, KCondition::K1, KCondition::K2,
                                             KCondition::K3};
        py::tuple out(4);
        for (int i = 0; i < 4; ++i) {
          const std::span<const KCondition> conds(all, static_cast<std::size_t>(i + 1));
          out[i] = static_cast<int>(constraint_solution_space(lambda, conds).cols());
        }
        return out;
      },
      py::arg("eigenvalues"),
      "solution-space dimensions of the cumulative condition systems "
      "{K0}, {K0,K1}, {K0,K1,K2}, {K0,K1,K2,K3}");

  m.attr("__version__") = "0.1.0";
}
