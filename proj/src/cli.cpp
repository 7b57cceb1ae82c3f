// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include "wavecnet/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "wavecnet/complexity.hpp"
#include "wavecnet/denoise.hpp"
#include "wavecnet/error.hpp"
#include "wavecnet/filterbank.hpp"
#include "wavecnet/io.hpp"
#include "wavecnet/nn/train.hpp"
#include "wavecnet/robustness.hpp"
#include "wavecnet/transform.hpp"

namespace wavecnet::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Globals {
  std::uint64_t seed = 0;
  std::string precision;  // empty: the subcommand's default
  std::size_t threads = 1;
};

// Model keys that have no flag form and pass straight into the model config.
bool is_model_only_key(const std::string& key, const json& value) {
  return key == "layers" || (key == "input" && value.is_array());
}

// Applies a JSON config file to the options of `sub` and the global options.
// Keys are option names with underscores for dashes; options given on the
// command line keep their values. Returns the model-only keys.
json apply_config(CLI::App& app, CLI::App& sub, const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, "config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "config '" + path + "' must hold a JSON object");
  json model = json::object();
  const bool takes_model = sub.get_option_no_throw("--architecture") != nullptr;
  for (const auto& [key, value] : j.items()) {
    if (takes_model && is_model_only_key(key, value)) {
      model[key] = value;
      continue;
    }
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    CLI::Option* opt = key == "config" || key == "help" ? nullptr : sub.get_option_no_throw(flag);
    if (!opt) opt = app.get_option_no_throw(flag);
    if (!opt || key == "config" || key == "help") {
      throw Error(Errc::InvalidConfig, "unknown key '" + key + "' in config '" + path + "'");
    }
    if (opt->count() > 0) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean() || value.is_number()) {
      text = value.dump();
    } else if (value.is_array()) {
      for (const auto& v : value) {
        if (!v.is_string()) throw Error(Errc::InvalidConfig, "key '" + key + "' must hold strings");
        text += (text.empty() ? "" : ",") + v.get<std::string>();
      }
    } else {
      throw Error(Errc::InvalidConfig, "key '" + key + "' has an unsupported value");
    }
    opt->add_result(text);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw Error(Errc::InvalidConfig, "bad value for '" + key + "': " + e.what());
    }
  }
  return model;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_text(path, text);
  }
}

Shape parse_shape(const std::string& text) {
  Shape shape;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    if (part.empty() || part.size() > 9 || !std::all_of(part.begin(), part.end(), ::isdigit) || std::stoul(part) == 0) {
      throw UsageError("bad shape '" + text + "', expected positive sizes like 28x28");
    }
    shape.push_back(std::stoul(part));
  }
  if (shape.empty()) throw UsageError("empty shape");
  return shape;
}

std::string resolve_precision(const Globals& g, const char* fallback) {
  return g.precision.empty() ? fallback : g.precision;
}

template <class Fn>
void with_precision(const std::string& precision, Fn&& fn) {
  if (precision == "f32") {
    fn(float{});
  } else {
    fn(double{});
  }
}

template <class Fn>
void with_checkpoint(const fs::path& path, Fn&& fn) {
  if (io::checkpoint_type(path) == io::ElementType::F32) {
    auto model = io::load_checkpoint<float>(path);
    fn(model);
  } else {
    auto model = io::load_checkpoint<double>(path);
    fn(model);
  }
}

bool looks_like_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path.string() + "' for reading");
  char magic[2] = {};
  in.read(magic, 2);
  return in.gcount() == 2 && magic[0] == 'P' && magic[1] == '5';
}

// PGM files load as [H, W]; WTN1 tensors keep their stored shape.
template <class T>
Tensor<T> load_image(const fs::path& path) {
  if (looks_like_pgm(path)) {
    const auto m = io::read_pgm(path);
    return Tensor<T>({m.rows, m.cols}, std::vector<T>(m.data.begin(), m.data.end()));
  }
  return io::read_tensor<T>(path);
}

// Writes PGM for a ".pgm" path (one plane only) and WTN1 otherwise.
template <class T>
void save_image(const fs::path& path, const Tensor<T>& t) {
  if (path.extension() == ".pgm") {
    const std::size_t h = t.dim(t.rank() - 2), w = t.dim(t.rank() - 1);
    if (t.size() != h * w) throw Error(Errc::ShapeMismatch, "PGM output needs a single plane, got " + shape_string(t.shape()));
    io::write_pgm(path, Matrix<double>(h, w, std::vector<double>(t.data().begin(), t.data().end())));
  } else {
    io::write_tensor(path, t);
  }
}

template <class T>
Tensor<T> as_batch(const Tensor<T>& t) {
  if (t.rank() == 2) return t.reshaped({1, 1, t.dim(0), t.dim(1)});
  if (t.rank() == 3) return t.reshaped({1, t.dim(0), t.dim(1), t.dim(2)});
  if (t.rank() == 4) return t;
  throw Error(Errc::ShapeMismatch, "images must have rank 2, 3 or 4, got " + shape_string(t.shape()));
}

template <class T>
Tensor<T> like_rank(const Tensor<T>& batch, std::size_t rank) {
  Shape s = batch.shape();
  s.erase(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(4 - rank));
  return batch.reshaped(s);
}

const std::array<const char*, 4> kBandSuffix{"_ll.wtn", "_lh.wtn", "_hl.wtn", "_hh.wtn"};

Dataset load_data(const std::string& images, const std::string& labels, std::size_t limit) {
  auto d = io::load_dataset(images, labels);
  if (limit > 0 && limit < d.size()) d = d.slice(0, limit);
  return d;
}

Tensor<float> load_images_only(const std::string& images, const std::string& labels, std::size_t limit) {
  if (fs::is_directory(images) || !labels.empty()) return load_data(images, labels, limit).images;
  auto t = io::read_idx_images(images);
  if (limit > 0 && limit < t.dim(0)) {
    const std::size_t per = t.size() / t.dim(0);
    Shape s = t.shape();
    s[0] = limit;
    t = Tensor<float>(s, std::vector<float>(t.data().begin(), t.data().begin() + static_cast<std::ptrdiff_t>(limit * per)));
  }
  return t;
}

struct ModelFlags {
  std::string architecture;
  std::string downsample = "dwt_ll:haar";
  std::size_t classes = 10;
  std::string strided_conv_wavelet;

  void add(CLI::App& sub) {
    sub.add_option("--architecture", architecture,
                   "wavecnet-mini, or custom (needs 'layers' and 'input' from --config); "
                   "default: custom when the config has layers, else wavecnet-mini")
        ->check(CLI::IsMember({"wavecnet-mini", "custom"}));
    sub.add_option("--downsample", downsample,
                   "max_pool, avg_pool, strided_conv, dwt_ll:W, dwt_avg:W or dwt_cat:W")
        ->capture_default_str();
    sub.add_option("--classes", classes, "number of classes")->capture_default_str();
    sub.add_option("--strided-conv-wavelet", strided_conv_wavelet,
                   "rewrite stride-2 convolutions as stride-1 convolution + dwt_ll with this wavelet");
  }

  nn::ModelConfig build(const json& model_keys, std::uint64_t seed) const {
    json j = model_keys;
    j["architecture"] = architecture.empty() ? (j.contains("layers") ? "custom" : "wavecnet-mini") : architecture;
    j["downsample"] = downsample;
    j["classes"] = classes;
    j["strided_conv_wavelet"] = strided_conv_wavelet;
    j["seed"] = seed;
    return nn::model_config_from_json(j);
  }
};

// filters

struct FiltersCmd {
  std::string wavelet;
  bool check = false;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("filters", "Print a registry wavelet's four filters as CSV");
    sub->add_option("--wavelet", wavelet, "haar, db2..db5, ch2.2, ch3.3, ...")->required();
    sub->add_flag("--check", check, "print the filter-bank identity checks instead");
  }

  int run(std::ostream& out) const {
    const auto& w = get_wavelet(wavelet);
    if (check) {
      const auto report = validate_filterbank(w);
      out << "check,passed,residual\n";
      for (const auto& c : report.checks) out << c.name << "," << (c.passed ? 1 : 0) << "," << fmt(c.residual) << "\n";
      return report.ok() ? kExitOk : kExitRuntime;
    }
    out << "index,analysis_low,analysis_high,synthesis_low,synthesis_high\n";
    for (std::size_t k = 0; k < w.length(); ++k) {
      out << k << "," << fmt(w.analysis_low[k]) << "," << fmt(w.analysis_high[k]) << "," << fmt(w.synthesis_low[k])
          << "," << fmt(w.synthesis_high[k]) << "\n";
    }
    return kExitOk;
  }
};

// transform / idwt / denoise

struct TransformCmd {
  std::string wavelet = "haar", in, prefix;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("transform", "One-level 2D DWT of a PGM image or WTN1 tensor");
    sub->add_option("--wavelet", wavelet, "wavelet name")->capture_default_str();
    sub->add_option("--in", in, "input .pgm or WTN1 file ([H,W], [C,H,W] or [N,C,H,W])")->required();
    sub->add_option("--out-prefix", prefix, "writes PREFIX_ll.wtn, _lh, _hl, _hh")->required();
  }

  int run(const Globals& g, std::ostream& out) const {
    const auto& spec = get_wavelet(wavelet);
    with_precision(resolve_precision(g, "f64"), [&](auto tag) {
      using T = decltype(tag);
      const auto x = load_image<T>(in);
      const auto bands = dwt2d_batch(as_batch(x), spec);
      const std::array<const Tensor<T>*, 4> parts{&bands.ll, &bands.lh, &bands.hl, &bands.hh};
      for (std::size_t b = 0; b < 4; ++b) {
        const std::string path = prefix + kBandSuffix[b];
        io::write_tensor(path, like_rank(*parts[b], x.rank()));
        out << path << "\n";
      }
    });
    return kExitOk;
  }
};

struct IdwtCmd {
  std::string wavelet = "haar", prefix, shape, out_path;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("idwt", "Inverse of transform: four subband files back to an image");
    sub->add_option("--wavelet", wavelet, "wavelet name")->capture_default_str();
    sub->add_option("--in-prefix", prefix, "reads PREFIX_ll.wtn, _lh, _hl, _hh")->required();
    sub->add_option("--shape", shape, "output HxW (default: twice the subband size)");
    sub->add_option("--out", out_path, "output .pgm (single plane) or WTN1 file")->required();
  }

  int run(const Globals& g, std::ostream& out) const {
    const auto& spec = get_wavelet(wavelet);
    with_precision(resolve_precision(g, "f64"), [&](auto tag) {
      using T = decltype(tag);
      std::array<Tensor<T>, 4> parts;
      for (std::size_t b = 0; b < 4; ++b) parts[b] = io::read_tensor<T>(prefix + kBandSuffix[b]);
      for (const auto& p : parts) {
        if (p.shape() != parts[0].shape()) throw Error(Errc::ShapeMismatch, "subband files differ in shape");
      }
      const std::size_t rank = parts[0].rank();
      const BatchSubbands<T> bands{as_batch(parts[0]), as_batch(parts[1]), as_batch(parts[2]), as_batch(parts[3])};
      std::size_t h = 2 * bands.ll.dim(2), w = 2 * bands.ll.dim(3);
      if (!shape.empty()) {
        const auto s = parse_shape(shape);
        if (s.size() != 2) throw UsageError("--shape takes HxW");
        h = s[0];
        w = s[1];
      }
      const auto y = idwt2d_batch(bands, spec, h, w);
      save_image(out_path, like_rank(y, rank));
    });
    out << out_path << "\n";
    return kExitOk;
  }
};

struct DenoiseCmd {
  std::string wavelet = "haar", in, out_path;
  double lambda = 0.1;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("denoise", "Soft-shrink the detail subbands of an image");
    sub->add_option("--wavelet", wavelet, "wavelet name")->capture_default_str();
    sub->add_option("--lambda", lambda, "shrinkage threshold on [0,1] intensities")->capture_default_str();
    sub->add_option("--in", in, "input .pgm or WTN1 file")->required();
    sub->add_option("--out", out_path, "output .pgm or WTN1 file")->required();
  }

  int run(const Globals& g, std::ostream& out) const {
    const DenoiseConfig cfg{wavelet, lambda};
    with_precision(resolve_precision(g, "f64"), [&](auto tag) {
      using T = decltype(tag);
      const auto x = load_image<T>(in);
      save_image(out_path, like_rank(denoise_image(as_batch(x), cfg), x.rank()));
    });
    out << out_path << "\n";
    return kExitOk;
  }
};

// train / eval

struct TrainCmd {
  std::string config;
  ModelFlags model;
  std::string train_images, train_labels, val_images, val_labels;
  double learning_rate = 0.1, momentum = 0.9, weight_decay = 5e-4;
  std::size_t batch = 64, epochs = 10, limit = 0;
  std::string checkpoint, report, report_json;
  bool quiet = false;
  CLI::App* sub = nullptr;

  void add(CLI::App& app) {
    sub = app.add_subcommand("train", "Train a network with SGD and momentum");
    sub->add_option("--config", config, "JSON run config; keys are option names, plus model 'layers'/'input'");
    model.add(*sub);
    sub->add_option("--train-images", train_images, "IDX image file or PGM directory");
    sub->add_option("--train-labels", train_labels, "IDX label file or labels CSV");
    sub->add_option("--val-images", val_images, "validation images");
    sub->add_option("--val-labels", val_labels, "validation labels");
    sub->add_option("--learning-rate,--lr", learning_rate, "initial learning rate")->capture_default_str();
    sub->add_option("--momentum", momentum, "SGD momentum")->capture_default_str();
    sub->add_option("--weight-decay", weight_decay, "L2 weight decay")->capture_default_str();
    sub->add_option("--batch", batch, "mini-batch size")->capture_default_str();
    sub->add_option("--epochs", epochs, "number of epochs")->capture_default_str();
    sub->add_option("--limit", limit, "use only the first N training samples (0: all)");
    sub->add_option("--checkpoint", checkpoint, "write the trained model here (WCN1)");
    sub->add_option("--report", report, "TrainReport CSV path (default: standard output)");
    sub->add_option("--report-json", report_json, "TrainReport JSON path (includes wall time)");
    sub->add_flag("--quiet", quiet, "no per-epoch progress on the error stream");
  }

  int run(CLI::App& app, const Globals& g, std::ostream& out, std::ostream& err) {
    json model_keys = json::object();
    if (!config.empty()) model_keys = apply_config(app, *sub, config);
    if (train_images.empty()) throw UsageError("train needs --train-images");
    const auto cfg = model.build(model_keys, g.seed);
    const auto train_set = load_data(train_images, train_labels, limit);
    std::optional<Dataset> val;
    if (!val_images.empty()) val = load_data(val_images, val_labels, 0);
    nn::TrainConfig tc;
    tc.learning_rate = learning_rate;
    tc.momentum = momentum;
    tc.weight_decay = weight_decay;
    tc.batch = batch;
    tc.epochs = epochs;
    tc.seed = g.seed;
    if (!quiet) {
      tc.on_epoch = [&err](const nn::EpochStats& s) {
        err << "epoch " << s.epoch << " lr " << s.learning_rate << " loss " << s.train_loss << " acc "
            << s.train_accuracy << " val_acc " << s.val_accuracy << "\n";
      };
    }
    int status = kExitOk;
    with_precision(resolve_precision(g, "f32"), [&](auto tag) {
      using T = decltype(tag);
      nn::Model<T> net(cfg);
      nn::TrainReport r;
      try {
        r = nn::train(net, train_set, val ? &*val : nullptr, tc);
      } catch (const nn::TrainingDiverged& e) {
        err << "error: " << e.what() << "\n";
        r = e.report();
        status = kExitRuntime;
      }
      emit(report, r.to_csv(), out);
      if (!report_json.empty()) io::write_text(report_json, r.to_json().dump(2) + "\n");
      if (!checkpoint.empty() && status == kExitOk) io::save_checkpoint(checkpoint, net);
    });
    return status;
  }
};

struct EvalCmd {
  std::string checkpoint, images, labels, format = "csv", out_path;
  std::size_t batch = 256, limit = 0;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("eval", "Clean loss, accuracy and top-1 error of a checkpoint");
    sub->add_option("--checkpoint", checkpoint, "WCN1 model file")->required();
    sub->add_option("--images", images, "IDX image file or PGM directory")->required();
    sub->add_option("--labels", labels, "IDX label file or labels CSV");
    sub->add_option("--batch", batch, "evaluation batch size")->capture_default_str();
    sub->add_option("--limit", limit, "use only the first N samples (0: all)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--out", out_path, "output path (default: standard output)");
  }

  int run(const Globals& g, std::ostream& out) const {
    const auto data = load_data(images, labels, limit);
    nn::Evaluation e;
    with_checkpoint(checkpoint, [&](auto& model) { e = nn::evaluate(model, data, batch, g.threads); });
    std::string text;
    if (format == "json") {
      text = json{{"count", e.count}, {"loss", e.loss}, {"accuracy", e.accuracy}, {"error", e.error}}.dump(2) + "\n";
    } else {
      text = "count,loss,accuracy,error\n" + std::to_string(e.count) + "," + fmt(e.loss) + "," + fmt(e.accuracy) + "," +
             fmt(e.error) + "\n";
    }
    emit(out_path, text, out);
    return kExitOk;
  }
};

// robustness / shift

struct RobustnessCmd {
  std::string checkpoint, images, labels, reference, kinds, severity_table, external_ce, name;
  std::string out_csv, out_json, errors_csv;
  std::size_t limit = 0;
  bool no_clip = false;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("robustness", "Noise error matrix, CE and mCE of a checkpoint");
    sub->add_option("--checkpoint", checkpoint, "WCN1 model file")->required();
    sub->add_option("--images", images, "IDX image file or PGM directory")->required();
    sub->add_option("--labels", labels, "IDX label file or labels CSV");
    sub->add_option("--reference", reference, "reference error matrix (.csv or .json); without it only the "
                                              "error matrix is produced");
    sub->add_option("--kinds", kinds, "comma-separated subset of gaussian_noise,shot_noise,impulse_noise");
    sub->add_option("--severity-table", severity_table, "JSON severity parameters");
    sub->add_option("--external-ce", external_ce, "JSON object of CE values for corruptions without generators");
    sub->add_option("--name", name, "model name stored in the error matrix");
    sub->add_option("--limit", limit, "use only the first N samples (0: all)");
    sub->add_flag("--no-clip", no_clip, "do not clip corrupted pixels to [0,1]");
    sub->add_option("--errors-csv", errors_csv, "also write this model's error matrix as CSV");
    sub->add_option("--out-csv", out_csv, "report CSV (default: standard output)");
    sub->add_option("--out-json", out_json, "report JSON");
  }

  static ErrorMatrix load_matrix(const std::string& path) {
    const auto text = io::read_text(path);
    if (fs::path(path).extension() == ".json") {
      try {
        return ErrorMatrix::from_json(json::parse(text));
      } catch (const json::exception& e) {
        throw Error(Errc::Format, "'" + path + "' is not valid JSON: " + e.what());
      }
    }
    return ErrorMatrix::from_csv(text, fs::path(path).stem().string());
  }

  int run(const Globals& g, std::ostream& out) const {
    std::vector<NoiseKind> selected;
    if (kinds.empty()) {
      selected.assign(all_noise_kinds().begin(), all_noise_kinds().end());
    } else {
      std::stringstream ss(kinds);
      std::string k;
      while (std::getline(ss, k, ',')) selected.push_back(parse_noise_kind(k));
    }
    CorruptOptions opt;
    opt.threads = g.threads;
    opt.clip = !no_clip;
    if (!severity_table.empty()) {
      try {
        opt.table = SeverityTable::from_json(json::parse(io::read_text(severity_table)));
      } catch (const json::exception& e) {
        throw Error(Errc::InvalidConfig, std::string("severity table is not valid JSON: ") + e.what());
      }
    }
    std::map<std::string, double> external;
    if (!external_ce.empty()) {
      try {
        external = json::parse(io::read_text(external_ce)).get<std::map<std::string, double>>();
      } catch (const json::exception& e) {
        throw Error(Errc::InvalidConfig, std::string("external CE file must map names to numbers: ") + e.what());
      }
    }
    const auto data = load_data(images, labels, limit);
    ErrorMatrix m;
    const std::string model_name = name.empty() ? fs::path(checkpoint).stem().string() : name;
    with_checkpoint(checkpoint, [&](auto& model) { m = noise_error_matrix(model, data, selected, g.seed, opt, model_name); });
    if (!errors_csv.empty()) io::write_text(errors_csv, m.to_csv());
    if (reference.empty()) {
      if (errors_csv.empty() || !out_csv.empty()) emit(out_csv, m.to_csv(), out);
      if (!out_json.empty()) io::write_text(out_json, m.to_json().dump(2) + "\n");
      return kExitOk;
    }
    const auto report = robustness_report(m, load_matrix(reference), external);
    emit(out_csv, report.to_csv(), out);
    if (!out_json.empty()) io::write_text(out_json, report.to_json().dump(2) + "\n");
    return kExitOk;
  }
};

struct ShiftCmd {
  std::string checkpoint, images, labels, out_path;
  int range = 8;
  std::size_t pairs = 64, limit = 0;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("shift", "Shift-consistency of a checkpoint's predictions");
    sub->add_option("--checkpoint", checkpoint, "WCN1 model file")->required();
    sub->add_option("--images", images, "IDX image file or PGM directory")->required();
    sub->add_option("--labels", labels, "ignored except to locate a labels CSV");
    sub->add_option("--range", range, "shifts are drawn from [-range, range]")->capture_default_str();
    sub->add_option("--pairs", pairs, "number of random shift pairs")->capture_default_str();
    sub->add_option("--limit", limit, "use only the first N images (0: all)");
    sub->add_option("--out", out_path, "JSON output path (default: standard output)");
  }

  int run(const Globals& g, std::ostream& out) const {
    const auto x = load_images_only(images, labels, limit);
    ShiftTrialConfig cfg;
    cfg.range = range;
    cfg.pairs = pairs;
    cfg.seed = g.seed;
    cfg.threads = g.threads;
    double value = 0.0;
    with_checkpoint(checkpoint, [&](auto& model) { value = shift_consistency(model, x, cfg); });
    const json j{{"consistency", value}, {"images", x.dim(0)}, {"pairs", pairs}, {"range", range},
                 {"padding", "reflect"}, {"seed", g.seed}};
    emit(out_path, j.dump(2) + "\n", out);
    return kExitOk;
  }
};

// flops

struct FlopsCmd {
  std::string config, input, format = "json", out_path;
  ModelFlags model;
  CLI::App* sub = nullptr;

  void add(CLI::App& app) {
    sub = app.add_subcommand("flops", "Multiply-add counts of a model, wavelet layers separately");
    sub->add_option("--config", config, "JSON model config");
    model.add(*sub);
    sub->add_option("--input", input, "input shape CxHxW or NxCxHxW (default: the model's input, batch 1)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--out", out_path, "output path (default: standard output)");
  }

  int run(CLI::App& app, const Globals& g, std::ostream& out) {
    json model_keys = json::object();
    if (!config.empty()) model_keys = apply_config(app, *sub, config);
    const auto cfg = model.build(model_keys, g.seed);
    const Shape shape = input.empty() ? cfg.input : parse_shape(input);
    const auto r = model_madds(cfg, shape);
    emit(out_path, format == "json" ? r.to_json().dump(2) + "\n" : r.to_csv(), out);
    return kExitOk;
  }
};

// Subcommands without a model section take --config as a plain option file.
void add_config_option(CLI::App& sub, std::string& path) {
  sub.add_option("--config", path, "JSON file whose keys are option names (underscores for dashes)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wavelet transforms, wavelet down-sampling networks and noise-robustness metrics", "wavecnet"};
  app.set_version_flag("--version", "wavecnet 0.1.0");
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Globals g;
  app.add_option("--seed", g.seed, "random seed (default 0)");
  app.add_option("--precision", g.precision, "f32 or f64 (default f64 for transform/idwt/denoise, f32 for train)")
      ->check(CLI::IsMember({"f32", "f64"}));
  app.add_option("--threads", g.threads, "worker threads for evaluation and corruption (default 1)")
      ->check(CLI::PositiveNumber);

  FiltersCmd filters;
  TransformCmd transform;
  IdwtCmd idwt;
  DenoiseCmd denoise;
  TrainCmd train;
  EvalCmd eval;
  RobustnessCmd robustness;
  ShiftCmd shift;
  FlopsCmd flops;
  filters.add(app);
  transform.add(app);
  idwt.add(app);
  denoise.add(app);
  train.add(app);
  eval.add(app);
  robustness.add(app);
  shift.add(app);
  flops.add(app);

  for (auto* sub : app.get_subcommands({})) {
    sub->footer(
        "Global options (before or after the subcommand):\n"
        "  --seed UINT        random seed (default 0)\n"
        "  --precision TEXT   f32 or f64\n"
        "  --threads UINT     worker threads (default 1)");
  }

  std::map<std::string, std::string> plain_configs;
  for (const char* name : {"filters", "transform", "idwt", "denoise", "eval", "robustness", "shift"}) {
    add_config_option(*app.get_subcommand(name), plain_configs[name]);
  }

  // CLI11 wants the arguments in reverse order.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "wavecnet 0.1.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    for (auto* sub : app.get_subcommands()) err << "run 'wavecnet " << sub->get_name() << " --help' for details\n";
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    if (auto it = plain_configs.find(name); it != plain_configs.end() && !it->second.empty()) {
      const json extra = apply_config(app, *sub, it->second);
      if (!extra.empty()) throw Error(Errc::InvalidConfig, "model keys are not accepted by '" + name + "'");
    }
    if (name == "filters") return filters.run(out);
    if (name == "transform") return transform.run(g, out);
    if (name == "idwt") return idwt.run(g, out);
    if (name == "denoise") return denoise.run(g, out);
    if (name == "train") return train.run(app, g, out, err);
    if (name == "eval") return eval.run(g, out);
    if (name == "robustness") return robustness.run(g, out);
    if (name == "shift") return shift.run(g, out);
    if (name == "flops") return flops.run(app, g, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  err << "usage error: unknown subcommand\n";
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace wavecnet::cli
