#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "convexeff/circle.hpp"
#include "convexeff/convexity.hpp"
#include "convexeff/core.hpp"
#include "convexeff/error.hpp"
#include "convexeff/hull.hpp"
#include "convexeff/ib.hpp"
#include "convexeff/stats.hpp"
#include "convexeff/wcs.hpp"

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace convexeff;

namespace {

MeaningModel make_meanings(const Matrix& m, const std::optional<Vector>& prior) {
  return MeaningModel(m, prior ? Prior::from_weights(*prior) : Prior::uniform(static_cast<std::size_t>(m.rows())));
}

py::dict solution_dict(const IBSolution& s) {
  py::dict d;
  d["beta"] = s.beta;
  d["encoder"] = s.encoder.q();
  d["marginal"] = s.marginal;
  d["decoder"] = s.decoder;
  d["objective"] = s.objective;
  d["complexity"] = s.complexity;
  d["accuracy"] = s.accuracy;
  d["iterations"] = s.iterations;
  d["converged"] = s.converged;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Information-bottleneck efficiency and convexity of category systems";

  py::register_exception<InputError>(m, "InputError", PyExc_OSError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<MeaningModel>(m, "MeaningModel")
      .def(py::init(&make_meanings), py::arg("m"), py::arg("prior") = py::none(),
           "Row t is the speaker's distribution over referents for target t. The prior defaults to uniform.")
      .def_property_readonly("m", [](const MeaningModel& mm) { return mm.m(); })
      .def_property_readonly("prior", [](const MeaningModel& mm) { return mm.prior().p(); })
      .def("__len__", &MeaningModel::size);

  m.def(
      "score",
      [](const Matrix& q, const MeaningModel& mm) {
        const IBScores s = score(NamingSystem(q), mm);
        return py::dict(py::arg("complexity") = s.complexity, py::arg("accuracy") = s.accuracy,
                        py::arg("cost") = s.cost);
      },
      py::arg("encoder"), py::arg("meanings"), "Complexity, accuracy and communicative cost in bits.");
  m.def("ib_objective", [](const Matrix& q, const MeaningModel& mm, double beta) {
    return ib_objective(NamingSystem(q), mm, beta);
  }, py::arg("encoder"), py::arg("meanings"), py::arg("beta"));

  m.def(
      "ba_fixed_point",
      [](const MeaningModel& mm, double beta, const Matrix& init, int max_iterations, bool accelerate) {
        FixedPointOptions opts;
        opts.max_iterations = max_iterations;
        opts.accelerate = accelerate;
        const IBSolution s = [&] {
          py::gil_scoped_release release;
          return ba_fixed_point(mm, beta, NamingSystem(init), opts);
        }();
        py::dict d = solution_dict(s);
        d["self_consistency_gap"] = self_consistency_gap(s, mm);
        return d;
      },
      py::arg("meanings"), py::arg("beta"), py::arg("init"), py::arg("max_iterations") = 10000,
      py::arg("accelerate") = true);

  m.def("perturbed_identity", [](std::size_t n, double noise, std::uint64_t seed) {
    return perturbed_identity(n, noise, seed).q();
  }, py::arg("n"), py::arg("noise") = 1e-2, py::arg("seed") = 1);
  m.def("geometric_grid", &geometric_grid, py::arg("lo"), py::arg("hi"), py::arg("n"));

  py::class_<Frontier>(m, "Frontier")
      .def_property_readonly("betas", &Frontier::betas)
      .def_property_readonly("complexity",
                             [](const Frontier& f) {
                               std::vector<double> v;
                               for (const auto& p : f.points()) v.push_back(p.complexity);
                               return v;
                             })
      .def_property_readonly("accuracy",
                             [](const Frontier& f) {
                               std::vector<double> v;
                               for (const auto& p : f.points()) v.push_back(p.accuracy);
                               return v;
                             })
      .def_property_readonly("unconverged_betas", &Frontier::unconverged_betas)
      .def("encoder", [](const Frontier& f, std::size_t i) { return f.encoders().at(i).q(); })
      .def("is_valid", [](const Frontier& f) { return f.check().ok(); },
           "Monotone and concave within the default tolerances.")
      .def("epsilon",
           [](const Frontier& f, double complexity, double accuracy) {
             const Deviation d = epsilon(complexity, accuracy, f);
             return py::make_tuple(d.epsilon, d.beta);
           },
           py::arg("complexity"), py::arg("accuracy"), "Deviation from the frontier in bits and the fitted beta.")
      .def("__len__", &Frontier::size);

  m.def(
      "compute_frontier",
      [](const MeaningModel& mm, const std::vector<double>& betas, std::uint64_t seed) {
        AnnealOptions opts;
        opts.seed = seed;
        py::gil_scoped_release release;
        return compute_frontier(mm, betas, opts);
      },
      py::arg("meanings"), py::arg("betas"), py::arg("seed") = 1,
      "Reverse deterministic annealing from the largest beta down.");

  m.def("system_consistency", [](const std::vector<int>& assign, const Matrix& coords) {
    return system_consistency(HardPartition(assign), Universe(coords));
  }, py::arg("assign"), py::arg("coords"), "Convexity consistency of a hard partition of points (one per row).");
  m.def("hull_contains", [](const Matrix& points, const Eigen::VectorXd& z) {
    return convex_hull(points).contains(z);
  }, py::arg("points"), py::arg("z"));

  m.def(
      "gaussian_meanings",
      [](const Matrix& coords, double sigma2) { return wcs::gaussian_meanings(Universe(coords), sigma2); },
      py::arg("coords"), py::arg("sigma2") = wcs::kDefaultSigma2);
  m.def(
      "load_wcs",
      [](const std::string& dir) {
        const wcs::Dataset d = wcs::load_wcs(wcs::DataFiles::in(dir));
        py::dict out;
        out["coords"] = d.universe.coords();
        py::dict langs;
        for (const auto& l : d.languages) langs[py::int_(l.language)] = wcs::probabilistic_system(l).q();
        out["languages"] = langs;
        return out;
      },
      py::arg("data_dir"), "Chip coordinates and each language's probabilistic naming system.");

  m.def(
      "circle_certainty_world",
      [](const std::vector<int>& assign) {
        const auto w = circle::theorem2_construction(HardPartition(assign));
        return py::dict(py::arg("support") = w.support, py::arg("q_assign") = w.q.assign(),
                        py::arg("p_accuracy") = w.p_scores.accuracy, py::arg("q_accuracy") = w.q_scores.accuracy,
                        py::arg("q_closed_form") = w.q_closed_form);
      },
      py::arg("assign"), "Certainty world in which the convex partition `assign` of the circle carries no information.");

  m.def("roc_auc", &stats::roc_auc, py::arg("scores"), py::arg("labels"));
}
