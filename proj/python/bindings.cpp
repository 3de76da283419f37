#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "saw/dgp_sim.hpp"
#include "saw/errors.hpp"
#include "saw/haar_basis.hpp"
#include "saw/jump_detect.hpp"
#include "saw/linalg.hpp"
#include "saw/panel_data.hpp"
#include "saw/pipeline.hpp"
#include "saw/report.hpp"

namespace py = pybind11;

namespace {

saw::PanelDataset load_csv(const std::string& path, const std::string& unit, const std::string& time,
                           const std::string& outcome, std::vector<std::string> regressors,
                           std::vector<std::string> instruments) {
  saw::ColumnSchema schema{unit, time, outcome, std::move(regressors), std::move(instruments)};
  return saw::load_panel_file(path, schema);
}

saw::PanelDataset from_text(const std::string& text) {
  std::istringstream in(text);
  return saw::load_panel(in);
}

saw::PipelineResult fit(const saw::PanelDataset& panel, const std::string& instruments,
                        const std::string& time_effects, int variance_case,
                        std::optional<double> lambda, bool common_jumps,
                        std::optional<std::vector<std::vector<int>>> taus) {
  saw::PipelineOptions opts;
  if (instruments == "two-stage" || instruments == "two_stage") opts.instruments = saw::InstrumentMode::two_stage;
  else if (instruments != "self") throw saw::Error(saw::ErrorCode::InvalidArgument, "instruments: self | two-stage");
  if (time_effects == "between") opts.time_effects = saw::TimeEffects::between;
  else if (time_effects != "unit") throw saw::Error(saw::ErrorCode::InvalidArgument, "time_effects: unit | between");
  opts.variance_case = variance_case;
  opts.saw.lambda = lambda;
  opts.common_jumps = common_jumps;
  opts.known_taus = std::move(taus);
  return saw::run_pipeline(panel, opts);
}

py::dict summary_dict(const saw::McResult& r) {
  auto as_list = [](const std::vector<saw::Summary>& v) {
    py::list out;
    for (const auto& s : v) out.append(py::make_tuple(s.mean, s.sd));
    return out;
  };
  py::dict d;
  d["reps"] = r.reps;
  d["failures"] = r.failures;
  d["s_tilde"] = as_list(r.s_tilde);
  d["hd"] = as_list(r.hd);
  d["mse"] = as_list(r.mse);
  std::ostringstream csv;
  saw::report::write_mc_table(csv, r);
  d["table_csv"] = csv.str();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wavelet-based structural break estimation for panel data";

  static py::exception<saw::Error> error(m, "SawError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const saw::Error& e) {
      py::set_error(error, (std::string(saw::to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<saw::PanelDataset>(m, "PanelDataset")
      .def_readonly("n", &saw::PanelDataset::n)
      .def_readonly("T", &saw::PanelDataset::T)
      .def_readonly("y", &saw::PanelDataset::y)
      .def_readonly("x", &saw::PanelDataset::x)
      .def_readonly("z", &saw::PanelDataset::z)
      .def_readonly("unit_labels", &saw::PanelDataset::unit_labels)
      .def_readonly("time_labels", &saw::PanelDataset::time_labels)
      .def_readonly("regressor_names", &saw::PanelDataset::regressor_names)
      .def_property_readonly("P", &saw::PanelDataset::P)
      .def_property_readonly("Q", &saw::PanelDataset::Q)
      .def("to_csv", [](const saw::PanelDataset& p) {
        std::ostringstream out;
        saw::write_panel_csv(out, p);
        return out.str();
      });

  m.def("make_panel", &saw::make_panel, py::arg("y"), py::arg("x"),
        py::arg("z") = std::vector<Eigen::MatrixXd>{}, py::arg("unit_labels") = std::vector<std::string>{},
        py::arg("time_labels") = std::vector<std::string>{});
  m.def("load_panel", &load_csv, py::arg("path"), py::arg("unit") = "unit", py::arg("time") = "time",
        py::arg("outcome") = "y", py::arg("regressors") = std::vector<std::string>{},
        py::arg("instruments") = std::vector<std::string>{});
  m.def("parse_panel", &from_text, py::arg("text"));
  m.def("dot_transform", &saw::dot_transform);

  py::class_<saw::RegressorJumps>(m, "RegressorJumps")
      .def_readonly("tau", &saw::RegressorJumps::tau)
      .def_readonly("delta_beta", &saw::RegressorJumps::delta_beta);
  py::class_<saw::SegmentRow>(m, "SegmentRow")
      .def_readonly("p", &saw::SegmentRow::p)
      .def_readonly("j", &saw::SegmentRow::j)
      .def_readonly("start", &saw::SegmentRow::start)
      .def_readonly("end", &saw::SegmentRow::end)
      .def_readonly("coef", &saw::SegmentRow::coef)
      .def_readonly("se", &saw::SegmentRow::se);
  py::class_<saw::ChowTest>(m, "ChowTest")
      .def_readonly("p", &saw::ChowTest::p)
      .def_readonly("j", &saw::ChowTest::j)
      .def_readonly("z", &saw::ChowTest::z)
      .def_readonly("p_value", &saw::ChowTest::p_value);

  py::class_<saw::PipelineResult>(m, "FitResult")
      .def_property_readonly("lambda_", [](const saw::PipelineResult& r) { return r.saw.lambda; })
      .def_property_readonly("kappa", [](const saw::PipelineResult& r) { return r.saw.kappa; })
      .def_property_readonly("v_hat", [](const saw::PipelineResult& r) { return r.saw.v_hat; })
      .def_property_readonly("gamma_hat", [](const saw::PipelineResult& r) { return r.saw.gamma_hat; })
      .def_property_readonly("gamma_raw", [](const saw::PipelineResult& r) { return r.saw.gamma_raw; })
      .def_property_readonly("jumps", [](const saw::PipelineResult& r) { return r.jumps.regressors; })
      .def_property_readonly("segments", [](const saw::PipelineResult& r) { return r.post.segments; })
      .def_property_readonly("tests", [](const saw::PipelineResult& r) { return r.post.tests; })
      .def_property_readonly("beta", [](const saw::PipelineResult& r) { return r.post.beta; })
      .def_property_readonly("covariance", [](const saw::PipelineResult& r) { return r.post.cov; })
      .def_readonly("beta_path", &saw::PipelineResult::beta_path)
      .def("to_json", [](const saw::PipelineResult& r) {
        return py::make_tuple(saw::report::saw_fit_json(r), saw::report::jumps_json(r),
                              saw::report::post_saw_json(r));
      })
      .def(
          "write",
          [](const saw::PipelineResult& r, const std::string& directory, bool plot) {
            saw::report::write_fit_artifacts(directory, r, plot);
          },
          py::arg("directory"), py::arg("plot") = false);

  m.def("fit", &fit, py::arg("panel"), py::arg("instruments") = "self", py::arg("time_effects") = "unit",
        py::arg("variance_case") = 4, py::arg("lambda_") = std::nullopt, py::arg("common_jumps") = false,
        py::arg("taus") = std::nullopt);

  m.def(
      "generate",
      [](int dgp, int n, int T, std::uint64_t seed, int jumps, double noise_scale) {
        saw::DgpSpec spec{dgp, n, T, seed, jumps, saw::NoiseParam::variance, noise_scale};
        auto g = saw::generate(spec);
        return py::make_tuple(g.panel, g.truth.beta, g.truth.taus);
      },
      py::arg("dgp"), py::arg("n"), py::arg("T"), py::arg("seed") = 1, py::arg("jumps") = -1,
      py::arg("noise_scale") = 1.0);

  m.def(
      "monte_carlo",
      [](int dgp, int n, int T, int reps, std::uint64_t seed, unsigned threads, std::string instruments) {
        saw::DgpSpec spec{dgp, n, T, seed};
        saw::MonteCarloOptions mc;
        mc.threads = threads;
        const bool two_stage = instruments == "two-stage" || (instruments == "auto" && dgp == 2);
        mc.pipeline.instruments = two_stage ? saw::InstrumentMode::two_stage : saw::InstrumentMode::self;
        saw::McResult result;
        {
          py::gil_scoped_release release;
          result = saw::run_monte_carlo(spec, reps, mc);
        }
        return summary_dict(result);
      },
      py::arg("dgp"), py::arg("n"), py::arg("T"), py::arg("reps"), py::arg("seed") = 1,
      py::arg("threads") = 0, py::arg("instruments") = "auto");

  m.def("true_beta", [](int S, int T, double a) {
    auto path = saw::true_beta(S, T, a);
    return py::make_tuple(path.values, path.taus);
  });
  m.def("hausdorff", &saw::hausdorff, py::arg("a"), py::arg("b"), py::arg("horizon"));
  m.def("inv_sqrt", &saw::inv_sqrt, py::arg("m"), py::arg("eps_rank") = 1e-10);
  m.def("haar_decompose", [](const std::vector<double>& g) {
    auto c = saw::haar::decompose(g);
    return py::make_tuple(c.c1, c.c);
  });
  m.def("haar_reconstruct", [](double c1, const std::vector<std::vector<double>>& c) {
    saw::haar::HaarCoefficients coeffs;
    coeffs.c1 = c1;
    coeffs.c = c;
    coeffs.depth = static_cast<int>(c.size()) + 1;
    return saw::haar::reconstruct(coeffs);
  });
}
