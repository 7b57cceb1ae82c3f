// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "wavecnet/cli.hpp"
#include "wavecnet/complexity.hpp"
#include "wavecnet/denoise.hpp"
#include "wavecnet/error.hpp"
#include "wavecnet/filterbank.hpp"
#include "wavecnet/io.hpp"
#include "wavecnet/robustness.hpp"
#include "wavecnet/transform.hpp"

namespace py = pybind11;
using namespace wavecnet;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix<double> to_matrix(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2D array");
  const auto r = static_cast<std::size_t>(a.shape(0)), c = static_cast<std::size_t>(a.shape(1));
  return Matrix<double>(r, c, std::vector<double>(a.data(), a.data() + r * c));
}

Array from_matrix(const Matrix<double>& m) {
  Array out({m.rows, m.cols});
  std::copy(m.data.begin(), m.data.end(), out.mutable_data());
  return out;
}

Tensor<double> to_tensor(const Array& a) {
  Shape shape(a.shape(), a.shape() + a.ndim());
  return Tensor<double>(shape, std::vector<double>(a.data(), a.data() + a.size()));
}

Array from_tensor(const Tensor<double>& t) {
  Array out(std::vector<py::ssize_t>(t.shape().begin(), t.shape().end()));
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

py::dict wavelet_dict(const WaveletSpec& w) {
  py::dict d;
  d["name"] = w.name;
  d["analysis_low"] = w.analysis_low;
  d["analysis_high"] = w.analysis_high;
  d["synthesis_low"] = w.synthesis_low;
  d["synthesis_high"] = w.synthesis_high;
  return d;
}

}  // namespace

PYBIND11_MODULE(_wavecnet, m) {
  m.doc() = "Wavelet transforms, wavelet down-sampling networks and robustness metrics";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const auto code = e.code();
      if (code == Errc::Io) {
        PyErr_SetString(PyExc_OSError, e.what());
      } else {
        PyErr_SetString(PyExc_ValueError, e.what());
      }
    }
  });

  m.def("wavelet_names", [] {
    std::vector<std::string> out;
    for (auto n : wavelet_names()) out.emplace_back(n);
    return out;
  });
  m.def("get_wavelet", [](const std::string& name) { return wavelet_dict(get_wavelet(name)); }, py::arg("name"));
  m.def(
      "validate_filterbank",
      [](const std::string& name) {
        const auto report = validate_filterbank(get_wavelet(name));
        py::dict d;
        for (const auto& c : report.checks) d[py::str(c.name)] = py::make_tuple(c.passed, c.residual);
        return d;
      },
      py::arg("name"), "Map of check name to (passed, residual).");

  m.def(
      "dwt2d",
      [](const Array& x, const std::string& wavelet) {
        const auto d = dwt2d(to_matrix(x), get_wavelet(wavelet));
        return py::make_tuple(from_matrix(d.ll), from_matrix(d.lh), from_matrix(d.hl), from_matrix(d.hh));
      },
      py::arg("x"), py::arg("wavelet") = "haar", "One-level 2D DWT; returns (ll, lh, hl, hh).");
  m.def(
      "idwt2d",
      [](const Array& ll, const Array& lh, const Array& hl, const Array& hh, std::size_t rows, std::size_t cols,
         const std::string& wavelet) {
        Decomposition2D<double> d{to_matrix(ll), to_matrix(lh), to_matrix(hl), to_matrix(hh), {rows, cols}};
        return from_matrix(idwt2d(d, get_wavelet(wavelet)));
      },
      py::arg("ll"), py::arg("lh"), py::arg("hl"), py::arg("hh"), py::arg("rows"), py::arg("cols"),
      py::arg("wavelet") = "haar");

  m.def("soft_shrink", [](double x, double lambda) { return soft_shrink(x, lambda); }, py::arg("x"),
        py::arg("lam"));
  m.def(
      "denoise_image",
      [](const Array& x, const std::string& wavelet, double lambda) {
        return from_matrix(denoise_image(to_matrix(x), DenoiseConfig{wavelet, lambda}));
      },
      py::arg("image"), py::arg("wavelet") = "haar", py::arg("lam") = 0.1);

  m.def("dwt2d_madds", &dwt2d_madds, py::arg("m"), py::arg("n"), py::arg("c"));
  m.def("idwt2d_madds", &idwt2d_madds, py::arg("m"), py::arg("n"), py::arg("c"));
  m.def(
      "model_madds",
      [](const std::string& config_json, const std::vector<std::size_t>& input) {
        return model_madds(nn::model_config_from_json(nlohmann::json::parse(config_json)), input).to_json().dump();
      },
      py::arg("config_json"), py::arg("input"), "Multiply-add report as a JSON string.");

  m.def(
      "corruption_error",
      [](const std::vector<double>& errors, const std::vector<double>& reference) {
        return corruption_error(errors, reference);
      },
      py::arg("errors"), py::arg("reference"));
  m.def(
      "mean_ce",
      [](const std::map<std::string, double>& ces, const std::string& category) {
        return mean_ce(ces, parse_category(category));
      },
      py::arg("ces"), py::arg("category"));
  m.def(
      "corrupt",
      [](const Array& images, const std::string& kind, int severity, std::uint64_t seed, bool clip) {
        CorruptOptions opt;
        opt.clip = clip;
        return from_tensor(corrupt(to_tensor(images), parse_noise_kind(kind), severity, seed, opt));
      },
      py::arg("images"), py::arg("kind"), py::arg("severity"), py::arg("seed") = 0, py::arg("clip") = true);

  m.def(
      "read_tensor", [](const std::string& path) { return from_tensor(io::read_tensor<double>(path)); },
      py::arg("path"));
  m.def(
      "write_tensor", [](const std::string& path, const Array& a) { io::write_tensor(path, to_tensor(a)); },
      py::arg("path"), py::arg("array"), "Writes a float64 WTN1 file.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
