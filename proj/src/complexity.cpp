// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include "wavecnet/complexity.hpp"

#include "wavecnet/error.hpp"
#include "wavecnet/filterbank.hpp"
#include "wavecnet/transform.hpp"

namespace wavecnet {
namespace {

void check_positive(std::int64_t m, std::int64_t n, std::int64_t c) {
  if (m < 1 || n < 1 || c < 1) {
    throw Error(Errc::NonPositive, "m, n and c must be at least 1, got (" + std::to_string(m) + ", " +
                                       std::to_string(n) + ", " + std::to_string(c) + ")");
  }
}

double percent(std::uint64_t part, std::uint64_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

// The expressions are integral once multiplied out: c(4m^2n + 2mn^2 - 3mn).
std::uint64_t dwt2d_madds(std::int64_t m, std::int64_t n, std::int64_t c) {
  check_positive(m, n, c);
  const auto um = static_cast<std::uint64_t>(m), un = static_cast<std::uint64_t>(n);
  return static_cast<std::uint64_t>(c) * (4 * um * um * un + 2 * um * un * un - 3 * um * un);
}

std::uint64_t idwt2d_madds(std::int64_t m, std::int64_t n, std::int64_t c) {
  check_positive(m, n, c);
  const auto um = static_cast<std::uint64_t>(m), un = static_cast<std::uint64_t>(n);
  return static_cast<std::uint64_t>(c) * (4 * um * un * un + 2 * um * um * un - 3 * um * un) + 3;
}

std::uint64_t banded_dwt2d_madds(const std::string& wavelet, std::size_t m, std::size_t n, bool ll_only) {
  const auto& spec = get_wavelet(wavelet);
  const auto rows = build_operator(spec, m);
  const auto cols = build_operator(spec, n);
  if (ll_only) return m * cols->L.nnz() + (n / 2) * rows->L.nnz();
  return m * (cols->L.nnz() + cols->H.nnz()) + 2 * (n / 2) * (rows->L.nnz() + rows->H.nnz());
}

MaddsReport model_madds(const nn::ModelConfig& cfg, const Shape& input) {
  MaddsReport report;
  nn::ModelConfig local = cfg;
  if (input.size() == 4) {
    report.batch = input[0];
    local.input = Shape(input.begin() + 1, input.end());
  } else if (input.size() == 3) {
    local.input = input;
  } else {
    throw Error(Errc::InvalidConfig, "input shape must be [C,H,W] or [N,C,H,W], got " + shape_string(input));
  }
  if (report.batch == 0) throw Error(Errc::InvalidConfig, "batch must be positive");

  std::vector<Shape> shapes;
  try {
    shapes = nn::trace_shapes(local);
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidConfig) throw;
    throw Error(Errc::InvalidConfig, e.what());
  }
  const auto specs = nn::expand_layers(local);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    LayerMadds row;
    row.index = i;
    row.input = shapes[i];
    row.output = shapes[i + 1];
    row.layer = nn::to_string(s.kind);
    switch (s.kind) {
      case nn::LayerKind::Conv:
        row.layer += " " + std::to_string(s.kernel) + "x" + std::to_string(s.kernel);
        row.madds = shape_size(row.output) * s.in * s.kernel * s.kernel;
        break;
      case nn::LayerKind::Dense:
        row.madds = s.in * s.out;
        break;
      case nn::LayerKind::Downsample:
        row.layer += " " + s.mode.to_string();
        if (s.mode.is_wavelet()) {
          const auto c = static_cast<std::int64_t>(row.input[0]);
          const auto h = static_cast<std::int64_t>(row.input[1]), w = static_cast<std::int64_t>(row.input[2]);
          row.wavelet = true;
          row.madds = dwt2d_madds(h, w, c);
          const bool ll_only = s.mode.kind == nn::DownsampleKind::DwtLL;
          row.banded = row.input[0] * banded_dwt2d_madds(s.mode.wavelet, row.input[1], row.input[2], ll_only);
          report.wavelet_ll_quarter += report.batch * (ll_only ? row.madds / 4 : row.madds);
        }
        break;
      default:
        break;
    }
    row.madds *= report.batch;
    row.banded *= report.batch;
    (row.wavelet ? report.wavelet : report.non_wavelet) += row.madds;
    report.wavelet_banded += row.banded;
    report.layers.push_back(std::move(row));
  }
  report.total = report.wavelet + report.non_wavelet;
  report.ratio = percent(report.wavelet, report.total);
  report.ratio_ll_quarter = percent(report.wavelet_ll_quarter, report.wavelet_ll_quarter + report.non_wavelet);
  return report;
}

std::string MaddsReport::to_csv() const {
  std::string out = "index,layer,input,output,madds,wavelet,banded_madds\n";
  for (const auto& l : layers) {
    out += std::to_string(l.index) + "," + l.layer + ",\"" + shape_string(l.input) + "\",\"" +
           shape_string(l.output) + "\"," + std::to_string(l.madds) + "," + (l.wavelet ? "1" : "0") + "," +
           std::to_string(l.banded) + "\n";
  }
  out += ",wavelet_total,,," + std::to_string(wavelet) + ",1," + std::to_string(wavelet_banded) + "\n";
  out += ",non_wavelet_total,,," + std::to_string(non_wavelet) + ",0,\n";
  out += ",total,,," + std::to_string(total) + ",,\n";
  return out;
}

nlohmann::json MaddsReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& l : layers) {
    rows.push_back({{"index", l.index},
                    {"layer", l.layer},
                    {"input", l.input},
                    {"output", l.output},
                    {"madds", l.madds},
                    {"wavelet", l.wavelet},
                    {"banded_madds", l.banded}});
  }
  return {{"batch", batch},
          {"layers", rows},
          {"wavelet_madds", wavelet},
          {"non_wavelet_madds", non_wavelet},
          {"total_madds", total},
          {"ratio", ratio},
          {"wavelet_madds_ll_quarter", wavelet_ll_quarter},
          {"ratio_ll_quarter", ratio_ll_quarter},
          {"wavelet_banded_madds", wavelet_banded}};
}

}  // namespace wavecnet
