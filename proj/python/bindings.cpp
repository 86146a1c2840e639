// sparsemusic._core: numpy-facing wrappers. Structured results come back as
// dicts (via the library's JSON encoders where one exists).

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sparsemusic/analysis.hpp"
#include "sparsemusic/experiment.hpp"
#include "sparsemusic/forward.hpp"
#include "sparsemusic/io.hpp"
#include "sparsemusic/music.hpp"
#include "sparsemusic/solvers.hpp"
#include "sparsemusic/spectral.hpp"

namespace py = pybind11;
using namespace sparsemusic;

namespace {

py::object to_py(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

ExperimentConfig config_of(const std::string& text) {
  return config_from_json(text.empty() ? Json::object() : Json::parse(text));
}

py::dict imaging_dict(const ImagingResult& img) {
  py::dict d;
  d["values"] = img.values;
  d["projector_norms"] = img.projector_norms;
  d["recovered"] = img.recovered_support;
  d["rule"] = img.rule;
  d["threshold"] = img.threshold_value;
  return d;
}

py::dict ric_dict(const RicEstimate& r) { return to_py(ric_to_json(r)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "MUSIC imaging, compressed-sensing analysis and sparse solvers";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  // ---- scene / forward ----
  m.def(
      "grid_points",
      [](std::size_t side, double spacing, bool centered) {
        const Grid g = Grid::planar(side, spacing, centered ? GridCentering::centered : GridCentering::first_quadrant);
        Eigen::MatrixX3d pts(static_cast<Eigen::Index>(g.size()), 3);
        for (std::size_t j = 0; j < g.size(); ++j) pts.row(static_cast<Eigen::Index>(j)) = g.point(j).transpose();
        return pts;
      },
      py::arg("side"), py::arg("spacing"), py::arg("centered") = true, "Planar lattice points, one row each.");

  m.def(
      "simulate",
      [](const std::string& config, std::uint64_t seed) {
        const ExperimentConfig c = config_of(config);
        const Grid grid = c.grid();
        const Instance in = simulate_instance(c, grid, seed);
        py::dict d;
        d["y"] = in.data.y;
        d["noise"] = in.data.noise;
        d["epsilon"] = in.data.epsilon_realized;
        d["phi_ext"] = in.imaging.phi_ext;
        d["psi_ext"] = in.imaging.psi_ext;
        d["support"] = in.scene.support;
        d["amplitudes"] = in.scene.amplitudes;
        return d;
      },
      py::arg("config") = "", py::arg("seed") = 1,
      "Draw one harness instance (config as a JSON string).");

  m.def(
      "farfield_fourier_pair",
      [](std::size_t side, double spacing, std::size_t n, std::size_t m_inc, std::uint64_t seed) {
        SamplingOptions so;
        so.incident_count = m_inc;
        const SensingPair p =
            farfield_pair(Grid::planar(side, spacing), draw_directions(n, SamplingKind::planar_fourier_directions, seed, so));
        return py::make_tuple(p.phi_ext, p.psi_ext);
      },
      py::arg("side"), py::arg("spacing"), py::arg("n"), py::arg("m"), py::arg("seed") = 1,
      "Normalized (Phi, Psi) over a planar grid from random planar-Fourier directions.");

  // ---- MUSIC ----
  m.def(
      "music",
      [](const CMatrix& y, const CMatrix& phi_ext, std::size_t s, const std::string& threshold, double gamma) {
        const SpectralDecomposition dec = decompose(y, RankRule::fixed(s));
        ImagingResult img = imaging_function(dec, phi_ext);
        if (threshold.empty()) top_peaks(img, s);
        else if (threshold == "fixed") threshold_support(img, ThresholdRule::fixed_rule());
        else if (threshold == "gamma") threshold_support(img, ThresholdRule::from_gamma(gamma));
        else throw DomainError("threshold must be '', 'fixed' or 'gamma'");
        py::dict d = imaging_dict(img);
        d["singular_values"] = dec.singular_values;
        return d;
      },
      py::arg("y"), py::arg("phi_ext"), py::arg("s"), py::arg("threshold") = "", py::arg("gamma") = 0.0,
      "Imaging function J over the columns of phi_ext; top-s peaks or a threshold rule.");

  m.def(
      "noise_space",
      [](const CMatrix& y, std::size_t s) {
        const SpectralDecomposition dec = decompose(y, RankRule::fixed(s));
        return py::make_tuple(dec.q1, dec.q2, dec.singular_values);
      },
      py::arg("y"), py::arg("s"));

  // ---- analysis ----
  m.def(
      "mutual_coherence",
      [](const CMatrix& a) {
        const CoherenceReport r = mutual_coherence(a);
        return py::make_tuple(r.mu, r.i, r.j);
      },
      py::arg("a"));
  m.def(
      "ric_bruteforce", [](const CMatrix& a, std::size_t r) { return ric_dict(ric_bruteforce(a, r)); }, py::arg("a"),
      py::arg("order"));
  m.def(
      "ric_coherence_bound",
      [](const CMatrix& a, std::size_t r) { return ric_dict(ric_coherence_bound(mutual_coherence(a), r)); },
      py::arg("a"), py::arg("order"));
  m.def(
      "gamma_exact", [](const CMatrix& phi, const IndexSet& s) { return gamma_exact(phi, s).gamma; }, py::arg("phi_ext"),
      py::arg("support"));
  m.def(
      "gamma_lower_bound",
      [](double dm, double dp) {
        const BoundValue b = gamma_lower_bound(dm, dp);
        return py::make_tuple(b.value, b.vacuous);
      },
      py::arg("delta_minus_s1"), py::arg("delta_plus_s"));
  m.def("delta_margin", &delta_margin, py::arg("gamma"));
  m.def("rho_star", &rho_star);
  m.def(
      "nsr_bound",
      [](const std::string& kind, double d, double margin, double dm, double dp) {
        NsrCase c = NsrCase::nor;
        if (kind == "nsr") c = NsrCase::nsr;
        else if (kind == "half_ric") c = NsrCase::half_ric;
        else if (kind != "nor") throw DomainError("kind must be nor, nsr or half_ric");
        return nsr_bound(c, d, margin, dm, dp);
      },
      py::arg("kind"), py::arg("dynamic_range"), py::arg("delta_margin"), py::arg("delta_minus") = 0.0,
      py::arg("delta_plus") = 0.0);
  m.def(
      "perturbation_check",
      [](const CMatrix& y, const CMatrix& e, std::size_t s) { return to_py(perturbation_to_json(perturbation_check(y, e, s))); },
      py::arg("y"), py::arg("e"), py::arg("s"));
  m.def(
      "stability_budget",
      [](const CMatrix& phi, const CMatrix& psi, const IndexSet& support, const std::vector<cplx>& amps,
         const CMatrix& noise, const std::string& ric) {
        Scene scene;
        scene.support = support;
        scene.amplitudes = amps;
        BudgetOptions bo;
        if (ric == "coherence") bo.ric = RicMethod::coherence_bound;
        else if (ric == "set-restricted") bo.ric = RicMethod::set_restricted;
        else if (ric != "bruteforce") throw DomainError("ric must be bruteforce, coherence or set-restricted");
        return to_py(budget_to_json(compute_budget(phi, psi, scene, noise, bo)));
      },
      py::arg("phi_ext"), py::arg("psi_ext"), py::arg("support"), py::arg("amplitudes"), py::arg("noise"),
      py::arg("ric") = "bruteforce");

  // ---- solvers ----
  m.def(
      "bpdn",
      [](const CMatrix& a, const CVector& y, double eps, double tol, std::size_t max_iters) {
        BpdnOptions o;
        o.tol = tol;
        o.max_iters = max_iters;
        const SparseSolution s = bpdn_solve({a, y, eps}, o);
        py::dict d = to_py(solution_to_json(s));
        d["z"] = s.z_hat;
        return d;
      },
      py::arg("a"), py::arg("y"), py::arg("epsilon") = 0.0, py::arg("tol") = 1e-8, py::arg("max_iters") = 50000,
      "min ||z||_1 s.t. ||y - A z|| <= epsilon (A with unit columns).");
  m.def(
      "omp",
      [](const CMatrix& a, const CVector& y, std::size_t s, double eps) {
        const SparseSolution sol = omp_solve({a, y, eps}, s);
        py::dict d = to_py(solution_to_json(sol));
        d["z"] = sol.z_hat;
        return d;
      },
      py::arg("a"), py::arg("y"), py::arg("s"), py::arg("epsilon") = 0.0);
  m.def(
      "bpdn_constants",
      [](double dm, double dp) {
        const BpdnConstants c = bpdn_error_constants(dm, dp);
        return py::make_tuple(c.condition_met, c.c1, c.c2);
      },
      py::arg("delta_minus_2s"), py::arg("delta_plus_2s"));

  // ---- spectral estimation ----
  m.def("tone_matrix", &tone_matrix, py::arg("times"), py::arg("tones"));
  m.def(
      "spectral_estimate",
      [](std::size_t tones, std::size_t s, std::size_t n, double sigma, bool exact, std::size_t realizations,
         std::uint64_t seed) {
        const SignalModel model = draw_signal_model(tones, s, n, seed);
        const SpectralResult r = covariance_music(signal_covariance(model, sigma * sigma, exact, realizations, seed + 1),
                                                  tone_matrix(model.times, tones), s);
        py::dict d;
        d["recovered"] = r.indices;
        d["truth"] = model.support;
        d["times"] = model.times;
        d["values"] = r.image.values;
        return d;
      },
      py::arg("tones"), py::arg("s"), py::arg("n"), py::arg("sigma") = 0.0, py::arg("exact") = true,
      py::arg("realizations") = 0, py::arg("seed") = 1, "Column indices (tone - 1) of the recovered frequencies.");

  // ---- harness ----
  m.def(
      "run_trial",
      [](const std::string& config, std::uint64_t seed) {
        const TrialOutcome o = run_trial(config_of(config), seed);
        py::dict d;
        d["exact"] = o.exact;
        d["recovered"] = o.recovered;
        d["truth"] = o.truth;
        d["epsilon"] = o.epsilon;
        d["failure"] = o.failure;
        return d;
      },
      py::arg("config") = "", py::arg("seed") = 1);
  m.def(
      "success_curve",
      [](const std::string& config, const std::string& axis, const std::vector<double>& values) {
        const ExperimentConfig c = config_of(config);
        return to_py(curve_json(success_curve(c, axis, values), c));
      },
      py::arg("config"), py::arg("axis"), py::arg("values"));
  m.def(
      "recoverable_sparsity",
      [](const std::string& config, const std::vector<std::size_t>& ns, const std::string& method) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const SparsityPoint& p : recoverable_sparsity(config_of(config), ns, method_from_string(method)))
          out.emplace_back(p.n, p.s_max);
        return out;
      },
      py::arg("config"), py::arg("n_list"), py::arg("method"));
  m.def("effective_config", [](const std::string& config) { return to_py(config_to_json(config_of(config))); },
        py::arg("config") = "");
}
