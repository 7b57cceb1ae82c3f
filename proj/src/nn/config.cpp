// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include "wavecnet/nn/config.hpp"

#include <set>

#include "wavecnet/error.hpp"
#include "wavecnet/filterbank.hpp"

namespace wavecnet::nn {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& message) { throw Error(Errc::InvalidConfig, message); }

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) invalid("unknown key '" + key + "' in " + where);
  }
}

template <class V>
V get_or(const json& j, const char* key, V fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<V>();
  } catch (const json::exception& e) {
    invalid(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

std::string DownsampleMode::to_string() const {
  switch (kind) {
    case DownsampleKind::MaxPool2: return "max_pool";
    case DownsampleKind::AvgPool2: return "avg_pool";
    case DownsampleKind::StridedConv: return "strided_conv";
    case DownsampleKind::DwtLL: return "dwt_ll:" + wavelet;
    case DownsampleKind::DwtAvg: return "dwt_avg:" + wavelet;
    case DownsampleKind::DwtCat: return "dwt_cat:" + wavelet;
  }
  return "?";
}

DownsampleMode DownsampleMode::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string head(text.substr(0, colon));
  const std::string tail = colon == std::string_view::npos ? "" : std::string(text.substr(colon + 1));
  auto need_wavelet = [&](DownsampleKind kind) {
    const std::string w = tail.empty() ? "haar" : tail;
    get_wavelet(w);  // validates the name
    return DownsampleMode{kind, w};
  };
  auto no_wavelet = [&](DownsampleKind kind) {
    if (!tail.empty()) invalid("down-sampling mode '" + head + "' takes no wavelet");
    return DownsampleMode{kind, {}};
  };
  if (head == "max_pool") return no_wavelet(DownsampleKind::MaxPool2);
  if (head == "avg_pool") return no_wavelet(DownsampleKind::AvgPool2);
  if (head == "strided_conv") return no_wavelet(DownsampleKind::StridedConv);
  if (head == "dwt_ll") return need_wavelet(DownsampleKind::DwtLL);
  if (head == "dwt_avg") return need_wavelet(DownsampleKind::DwtAvg);
  if (head == "dwt_cat") return need_wavelet(DownsampleKind::DwtCat);
  invalid("unknown down-sampling mode '" + std::string(text) + "'");
}

LayerSpec LayerSpec::conv(std::size_t k, std::size_t in, std::size_t out, std::size_t stride, int padding) {
  LayerSpec s;
  s.kind = LayerKind::Conv;
  s.kernel = k;
  s.in = in;
  s.out = out;
  s.stride = stride;
  s.padding = padding;
  return s;
}

LayerSpec LayerSpec::batch_norm(std::size_t channels) {
  LayerSpec s;
  s.kind = LayerKind::BatchNorm;
  s.channels = channels;
  return s;
}

LayerSpec LayerSpec::relu() { return LayerSpec{}; }

LayerSpec LayerSpec::downsample() {
  LayerSpec s;
  s.kind = LayerKind::Downsample;
  return s;
}

LayerSpec LayerSpec::downsample(DownsampleMode mode) {
  LayerSpec s = downsample();
  s.use_model_mode = false;
  s.mode = std::move(mode);
  return s;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = LayerKind::Flatten;
  return s;
}

LayerSpec LayerSpec::dense(std::size_t in, std::size_t out) {
  LayerSpec s;
  s.kind = LayerKind::Dense;
  s.in = in;
  s.out = out;
  return s;
}

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv: return "conv";
    case LayerKind::BatchNorm: return "batch_norm";
    case LayerKind::ReLU: return "relu";
    case LayerKind::Downsample: return "downsample";
    case LayerKind::Flatten: return "flatten";
    case LayerKind::Dense: return "dense";
  }
  return "?";
}

ModelConfig wavecnet_mini(DownsampleMode mode, std::uint64_t seed, std::size_t classes) {
  ModelConfig cfg;
  cfg.architecture = "wavecnet-mini";
  cfg.input = {1, 28, 28};
  cfg.classes = classes;
  cfg.downsample = mode;
  cfg.seed = seed;
  const std::size_t f = mode.channel_factor();
  cfg.layers = {
      LayerSpec::conv(3, 1, 16, 1, 3), LayerSpec::batch_norm(16), LayerSpec::relu(), LayerSpec::downsample(),
      LayerSpec::conv(3, 16 * f, 32), LayerSpec::batch_norm(32), LayerSpec::relu(), LayerSpec::downsample(),
      LayerSpec::conv(3, 32 * f, 64), LayerSpec::batch_norm(64), LayerSpec::relu(), LayerSpec::downsample(),
      LayerSpec::flatten(), LayerSpec::dense(64 * f * 4 * 4, classes),
  };
  return cfg;
}

std::vector<LayerSpec> expand_layers(const ModelConfig& cfg) {
  std::vector<LayerSpec> out;
  // Channel count flowing into a StridedConv down-sampling.
  std::size_t channels = cfg.input.empty() ? 0 : cfg.input[0];
  auto push_conv = [&](LayerSpec conv) {
    if (conv.stride == 2 && !cfg.strided_conv_wavelet.empty()) {
      conv.stride = 1;
      out.push_back(conv);
      out.push_back(LayerSpec::downsample(DownsampleMode::dwt_ll(cfg.strided_conv_wavelet)));
    } else {
      out.push_back(conv);
    }
  };
  for (const auto& layer : cfg.layers) {
    switch (layer.kind) {
      case LayerKind::Conv:
        push_conv(layer);
        channels = layer.out;
        break;
      case LayerKind::Downsample: {
        const DownsampleMode mode = layer.use_model_mode ? cfg.downsample : layer.mode;
        if (mode.kind == DownsampleKind::StridedConv) {
          push_conv(LayerSpec::conv(3, channels, channels, 2, 1));
        } else {
          out.push_back(LayerSpec::downsample(mode));
          channels *= mode.channel_factor();
        }
        break;
      }
      default:
        out.push_back(layer);
    }
  }
  return out;
}

std::vector<Shape> trace_shapes(const ModelConfig& cfg) {
  if (cfg.input.size() != 3) invalid("input shape must be [C, H, W], got " + shape_string(cfg.input));
  for (std::size_t d : cfg.input) {
    if (d == 0) invalid("input shape has a zero dimension");
  }
  if (cfg.classes == 0) invalid("classes must be positive");
  std::vector<Shape> shapes{cfg.input};
  for (const auto& layer : expand_layers(cfg)) {
    const Shape& s = shapes.back();
    const std::string where = "layer " + std::to_string(shapes.size() - 1) + " (" + to_string(layer.kind) + ")";
    switch (layer.kind) {
      case LayerKind::Conv: {
        if (s.size() != 3) invalid(where + " needs a [C,H,W] input");
        if (s[0] != layer.in) {
          invalid(where + " expects " + std::to_string(layer.in) + " input channels, got " + std::to_string(s[0]));
        }
        if (layer.kernel == 0 || layer.out == 0 || layer.stride == 0) invalid(where + " has a zero size");
        const std::size_t p = layer.effective_padding();
        if (s[1] + 2 * p < layer.kernel || s[2] + 2 * p < layer.kernel) invalid(where + " kernel larger than input");
        shapes.push_back({layer.out, (s[1] + 2 * p - layer.kernel) / layer.stride + 1,
                          (s[2] + 2 * p - layer.kernel) / layer.stride + 1});
        break;
      }
      case LayerKind::BatchNorm:
        if (s.size() != 3 || s[0] != layer.channels) invalid(where + " channel count mismatch");
        shapes.push_back(s);
        break;
      case LayerKind::ReLU:
        shapes.push_back(s);
        break;
      case LayerKind::Downsample:
        if (s.size() != 3) invalid(where + " needs a [C,H,W] input");
        if (s[1] % 2 != 0 || s[2] % 2 != 0) {
          throw Error(Errc::OddSpatial, where + " sees odd spatial size " + shape_string(s));
        }
        shapes.push_back({s[0] * layer.mode.channel_factor(), s[1] / 2, s[2] / 2});
        break;
      case LayerKind::Flatten:
        shapes.push_back({shape_size(s)});
        break;
      case LayerKind::Dense:
        if (s.size() != 1 || s[0] != layer.in) {
          invalid(where + " expects " + std::to_string(layer.in) + " features, got " + shape_string(s));
        }
        if (layer.out == 0) invalid(where + " has zero outputs");
        shapes.push_back({layer.out});
        break;
    }
  }
  if (shapes.back() != Shape{cfg.classes}) {
    invalid("network output " + shape_string(shapes.back()) + " does not match " + std::to_string(cfg.classes) +
            " classes");
  }
  return shapes;
}

nlohmann::json to_json(const ModelConfig& cfg) {
  json layers = json::array();
  for (const auto& l : cfg.layers) {
    json e{{"type", to_string(l.kind)}};
    switch (l.kind) {
      case LayerKind::Conv:
        e["kernel"] = l.kernel;
        e["in"] = l.in;
        e["out"] = l.out;
        e["stride"] = l.stride;
        e["padding"] = l.padding;
        break;
      case LayerKind::BatchNorm: e["channels"] = l.channels; break;
      case LayerKind::Downsample:
        if (!l.use_model_mode) e["mode"] = l.mode.to_string();
        break;
      case LayerKind::Dense:
        e["in"] = l.in;
        e["out"] = l.out;
        break;
      default: break;
    }
    layers.push_back(std::move(e));
  }
  json out{{"architecture", cfg.architecture},
            {"classes", cfg.classes},
            {"downsample", cfg.downsample.to_string()},
            {"strided_conv_wavelet", cfg.strided_conv_wavelet},
            {"seed", cfg.seed}};
  if (cfg.architecture != "wavecnet-mini") {
    out["layers"] = std::move(layers);
    out["input"] = cfg.input;
  }
  return out;
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"architecture", "layers", "input", "classes", "downsample", "strided_conv_wavelet", "seed"},
                      "model config");
  ModelConfig cfg;
  cfg.architecture = get_or<std::string>(j, "architecture", "custom");
  cfg.downsample = DownsampleMode::parse(get_or<std::string>(j, "downsample", "max_pool"));
  cfg.classes = get_or<std::size_t>(j, "classes", 10);
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
  cfg.strided_conv_wavelet = get_or<std::string>(j, "strided_conv_wavelet", "");
  if (!cfg.strided_conv_wavelet.empty()) get_wavelet(cfg.strided_conv_wavelet);

  if (cfg.architecture == "wavecnet-mini") {
    if (j.contains("layers") || j.contains("input")) invalid("wavecnet-mini fixes its own layers and input");
    ModelConfig mini = wavecnet_mini(cfg.downsample, cfg.seed, cfg.classes);
    mini.strided_conv_wavelet = cfg.strided_conv_wavelet;
    return mini;
  }
  if (cfg.architecture != "custom") invalid("unknown architecture '" + cfg.architecture + "'");

  cfg.input = get_or<Shape>(j, "input", Shape{1, 28, 28});
  if (!j.contains("layers") || !j.at("layers").is_array()) invalid("custom architecture needs a 'layers' array");
  for (const auto& e : j.at("layers")) {
    const auto type = get_or<std::string>(e, "type", "");
    if (type == "conv") {
      reject_unknown_keys(e, {"type", "kernel", "in", "out", "stride", "padding"}, "conv layer");
      cfg.layers.push_back(LayerSpec::conv(get_or<std::size_t>(e, "kernel", 3), get_or<std::size_t>(e, "in", 0),
                                           get_or<std::size_t>(e, "out", 0), get_or<std::size_t>(e, "stride", 1),
                                           get_or<int>(e, "padding", -1)));
    } else if (type == "batch_norm") {
      reject_unknown_keys(e, {"type", "channels"}, "batch_norm layer");
      cfg.layers.push_back(LayerSpec::batch_norm(get_or<std::size_t>(e, "channels", 0)));
    } else if (type == "relu") {
      reject_unknown_keys(e, {"type"}, "relu layer");
      cfg.layers.push_back(LayerSpec::relu());
    } else if (type == "downsample") {
      reject_unknown_keys(e, {"type", "mode"}, "downsample layer");
      cfg.layers.push_back(e.contains("mode")
                               ? LayerSpec::downsample(DownsampleMode::parse(get_or<std::string>(e, "mode", "")))
                               : LayerSpec::downsample());
    } else if (type == "flatten") {
      reject_unknown_keys(e, {"type"}, "flatten layer");
      cfg.layers.push_back(LayerSpec::flatten());
    } else if (type == "dense") {
      reject_unknown_keys(e, {"type", "in", "out"}, "dense layer");
      cfg.layers.push_back(LayerSpec::dense(get_or<std::size_t>(e, "in", 0), get_or<std::size_t>(e, "out", 0)));
    } else {
      invalid("unknown layer type '" + type + "'");
    }
  }
  return cfg;
}

}  // namespace wavecnet::nn
