#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "w2lab/acceptance.hpp"
#include "w2lab/bounds.hpp"
#include "w2lab/harmonic.hpp"
#include "w2lab/lab.hpp"
#include "w2lab/transport.hpp"

namespace py = pybind11;
using namespace w2lab;

namespace {

int coord_count(const SpaceModel& s) { return s.is_torus() ? s.dim() : 4; }

std::vector<Point> to_points(const SpaceModel& s, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  const int k = coord_count(s);
  if (a.ndim() == 1 && k == 1) a = a.reshape({a.shape(0), py::ssize_t{1}});
  if (a.ndim() != 2 || a.shape(1) != k) {
    throw Error(ErrorCode::InvalidArgument, "points must have shape (n, " + std::to_string(k) + ")");
  }
  auto r = a.unchecked<2>();
  std::vector<Point> out(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    for (int j = 0; j < k; ++j) out[i][j] = r(i, j);
  }
  return out;
}

py::array_t<double> from_points(const SpaceModel& s, const std::vector<Point>& pts) {
  const int k = coord_count(s);
  py::array_t<double> a({static_cast<py::ssize_t>(pts.size()), static_cast<py::ssize_t>(k)});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int j = 0; j < k; ++j) w(i, j) = pts[i][j];
  }
  return a;
}

py::dict components(const BoundReport& r) {
  py::dict d;
  for (const auto& c : r.components) d[py::str(c.name)] = c.value;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wasserstein rates for empirical measures on tori and compact groups";

  py::register_exception<Error>(m, "W2LabError", PyExc_ValueError);

  py::class_<SpaceModel>(m, "SpaceModel")
      .def_static("circle", &SpaceModel::circle)
      .def_static("torus", &SpaceModel::flat_torus, py::arg("d"))
      .def_static("su2", &SpaceModel::su2)
      .def_static("so3", &SpaceModel::so3)
      .def_static("parse", &SpaceModel::parse)
      .def_property_readonly("dim", &SpaceModel::dim)
      .def_property_readonly("diameter", &SpaceModel::diameter)
      .def_property_readonly("name", &SpaceModel::name)
      .def("__eq__", [](const SpaceModel& a, const SpaceModel& b) { return a == b; })
      .def("__repr__", [](const SpaceModel& s) { return "SpaceModel(" + s.name() + ")"; });

  py::class_<MeasureSpec>(m, "MeasureSpec")
      .def_static("uniform", &MeasureSpec::uniform)
      .def_static(
          "empirical",
          [](const SpaceModel& s, py::array_t<double> pts) { return MeasureSpec::empirical(s, to_points(s, pts)); })
      .def_static("atomic",
                  [](const SpaceModel& s, py::array_t<double> pts, std::vector<double> w) {
                    return MeasureSpec::atomic(s, to_points(s, pts), std::move(w));
                  })
      .def_property_readonly("space", &MeasureSpec::space);

  m.def(
      "cosine_mixture",
      [](const SpaceModel& s, double a) {
        TrigTerm t;
        t.k[0] = 1;
        t.a = a;
        return MeasureSpec::mixture(s, 1.0 - a, {t});
      },
      py::arg("space"), py::arg("amplitude"), "Density 1 + a cos(2 pi x_1) on a torus.");

  py::class_<ProcessSpec>(m, "ProcessSpec")
      .def_static("iid", &ProcessSpec::iid, py::arg("mu"), py::arg("n"), py::arg("seed"))
      .def_static("teleport", &ProcessSpec::teleport, py::arg("mu"), py::arg("theta"), py::arg("n"), py::arg("seed"))
      .def_static("walk", &ProcessSpec::walk, py::arg("step"), py::arg("n"), py::arg("seed"))
      .def_static(
          "two_island",
          [](const SpaceModel& s, std::int64_t n, std::uint64_t seed) { return ProcessSpec::two_island(s, n, seed); },
          py::arg("space"), py::arg("n"), py::arg("seed"))
      .def("stationary", &ProcessSpec::stationary);

  m.def(
      "sample",
      [](const ProcessSpec& p, std::uint64_t stream) {
        SampleTrace tr = sample(p, stream);
        return from_points(p.stationary().space(), tr.points);
      },
      py::arg("process"), py::arg("stream") = 0, "Points of the trace as an (n, k) array.");

  py::class_<BoundReport>(m, "BoundReport")
      .def_readonly("value", &BoundReport::value)
      .def_readonly("t_star", &BoundReport::t_star)
      .def_readonly("formula_id", &BoundReport::formula_id)
      .def_readonly("warnings", &BoundReport::warnings)
      .def_readonly("inputs", &BoundReport::inputs)
      .def_property_readonly("components", &components)
      .def("component", &BoundReport::component);

  m.def("circle_bound", &circle_bound, py::arg("c"), py::arg("B"), py::arg("N"));
  m.def("mean_square_optimized", &mean_square_optimized, py::arg("process"), py::arg("N"), py::arg("t_lo") = 1e-9,
        py::arg("t_hi") = 1.0);
  m.def(
      "smoothing_rhs",
      [](const MeasureSpec& mu, const MeasureSpec& nu, double t) { return smoothing_rhs(mu, nu, t); },
      py::arg("mu"), py::arg("nu"), py::arg("t"));
  m.def("q_w2_bound", &q_w2_bound, py::arg("q"), py::arg("space"));
  m.def("rw_empirical_bound", &rw_empirical_bound, py::arg("B"), py::arg("N"), py::arg("space"));
  m.def("walk_budget", &walk_budget, py::arg("p"));
  m.def(
      "semisimple_pipeline",
      [](double b, const std::string& mode, std::int64_t n, const SpaceModel& s) {
        PipelineMode pm;
        if (mode == "walk") pm = PipelineMode::Walk;
        else if (mode == "empirical") pm = PipelineMode::Empirical;
        else throw Error(ErrorCode::InvalidArgument, "mode must be walk or empirical");
        return semisimple_pipeline(GapInput{b, 1}, pm, n, s);
      },
      py::arg("b"), py::arg("mode"), py::arg("n"), py::arg("space"));
  m.def("quantization_floor", &quantization_floor, py::arg("N_atoms"), py::arg("space"));

  m.def("lps_generators", &lps_generators, py::arg("p"), py::arg("target"));
  m.def(
      "lps_spectral_radius",
      [](int p, int n_max) {
        SpectralRadiusReport r = spectral_radius_q(fourier_su2(lps_generators(p, SpaceModel::su2()), n_max));
        return r.q_at_cutoff;
      },
      py::arg("p"), py::arg("n_max") = 16);

  m.def(
      "w2_circle_exact",
      [](py::array_t<double> pts, const MeasureSpec& nu) {
        return w2_circle_exact(to_points(SpaceModel::circle(), pts), nu);
      },
      py::arg("points"), py::arg("target"), "Squared W2 between the empirical measure and the target.");

  py::class_<SemiDiscreteResult>(m, "SemiDiscreteResult")
      .def_readonly("value", &SemiDiscreteResult::value)
      .def_readonly("error_bound", &SemiDiscreteResult::error_bound)
      .def_readonly("certified", &SemiDiscreteResult::certified)
      .def_property_readonly("certificate_ok",
                             [](const SemiDiscreteResult& r) -> std::optional<bool> {
                               if (!r.certificate) return std::nullopt;
                               return r.certificate->ok;
                             });

  m.def(
      "w2_semidiscrete",
      [](py::array_t<double> pts, const MeasureSpec& target, int grid, int reference_size, bool verify) {
        SemiDiscreteOptions o;
        o.grid = grid;
        o.reference_size = reference_size;
        o.verify = verify;
        return w2_semidiscrete(to_points(target.space(), pts), target, o);
      },
      py::arg("points"), py::arg("target"), py::arg("grid") = 64, py::arg("reference_size") = 4096,
      py::arg("verify") = false);

  py::class_<MCEstimate>(m, "MCEstimate")
      .def_readonly("mean", &MCEstimate::mean)
      .def_readonly("variance", &MCEstimate::variance)
      .def_readonly("replicates", &MCEstimate::replicates)
      .def_readonly("ci_half_width", &MCEstimate::ci_half_width)
      .def_readonly("systematic_band", &MCEstimate::systematic_band)
      .def_readonly("plans_verified", &MCEstimate::plans_verified)
      .def_readonly("plans_failed", &MCEstimate::plans_failed)
      .def_readonly("values", &MCEstimate::values);

  m.def(
      "mc_expected_w2sq",
      [](const ProcessSpec& p, const MeasureSpec& target, int R, std::uint64_t seed, int grid, int threads,
         bool verify) {
        MCOptions o;
        o.semidiscrete.grid = grid;
        o.semidiscrete.verify = verify;
        o.threads = threads;
        py::gil_scoped_release release;
        return mc_expected_w2sq(p, target, R, seed, o);
      },
      py::arg("process"), py::arg("target"), py::arg("R"), py::arg("seed"), py::arg("grid") = 64,
      py::arg("threads") = 1, py::arg("verify") = false);

  m.def(
      "execute_config",
      [](const std::string& text) {
        RunResult r = execute(parse_config(text));
        py::dict out;
        out["csv"] = results_csv(r);
        out["exit_code"] = r.exit_code;
        out["violations"] = r.violations;
        out["slope"] = r.fit ? py::cast(r.fit->slope) : py::none();
        return out;
      },
      py::arg("config_text"), "Runs a lab config held in a string and returns the results table.");

  m.def("list_experiments", [] {
    py::list out;
    for (const auto& e : list_experiments()) {
      py::dict d;
      d["id"] = e.id;
      d["criterion"] = e.criterion;
      d["check"] = e.check;
      d["expected"] = e.expected;
      d["config"] = e.config;
      out.append(d);
    }
    return out;
  });

  py::class_<CriterionResult>(m, "CriterionResult")
      .def_readonly("id", &CriterionResult::id)
      .def_readonly("name", &CriterionResult::name)
      .def_readonly("passed", &CriterionResult::pass)
      .def_readonly("detail", &CriterionResult::detail)
      .def_readonly("seconds", &CriterionResult::seconds)
      .def("__str__", &format_result);

  m.def(
      "run_criterion",
      [](int id) {
        py::gil_scoped_release release;
        return run_criterion(id);
      },
      py::arg("id"));
}
