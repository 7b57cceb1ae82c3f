// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include "wavecnet/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "wavecnet/error.hpp"

namespace wavecnet::io {
namespace {

constexpr std::uint32_t kIdxImages = 0x00000803;
constexpr std::uint32_t kIdxLabels = 0x00000801;
constexpr char kTensorMagic[4] = {'W', 'T', 'N', '1'};
constexpr char kCheckpointMagic[4] = {'W', 'C', 'N', '1'};

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ostream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(Errc::Io, "write to '" + path.string() + "' failed");
}

void read_exact(std::istream& in, void* dst, std::size_t n, const char* what) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw Error(Errc::Format, std::string("truncated ") + what);
}

template <class U>
void put_le(std::ostream& out, U v) {
  char b[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  out.write(b, sizeof(U));
}

template <class U>
U get_le(std::istream& in, const char* what) {
  unsigned char b[sizeof(U)];
  read_exact(in, b, sizeof(U), what);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<U>(v);
}

void put_be32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                     static_cast<char>(v)};
  out.write(b, 4);
}

std::uint32_t get_be32(std::istream& in, const char* what) {
  unsigned char b[4];
  read_exact(in, b, 4, what);
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

template <class T>
void put_values(std::ostream& out, std::span<const T> values) {
  using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  std::vector<char> buf(values.size() * sizeof(T));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<Bits>(values[i]);
    for (std::size_t k = 0; k < sizeof(T); ++k) buf[i * sizeof(T) + k] = static_cast<char>((bits >> (8 * k)) & 0xff);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

template <class T>
std::vector<T> get_values(std::istream& in, std::size_t count, const char* what) {
  using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  std::vector<unsigned char> buf(count * sizeof(T));
  read_exact(in, buf.data(), buf.size(), what);
  std::vector<T> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    Bits bits = 0;
    for (std::size_t k = 0; k < sizeof(T); ++k) bits |= static_cast<Bits>(buf[i * sizeof(T) + k]) << (8 * k);
    out[i] = std::bit_cast<T>(bits);
  }
  return out;
}

// Header fields shared by WTN1 files and the tensors inside checkpoints.
Shape get_dims(std::istream& in, std::size_t rank) {
  Shape shape(rank);
  std::size_t total = 1;
  for (auto& d : shape) {
    const auto v = get_le<std::uint64_t>(in, "tensor dims");
    if (v == 0 || v > (std::uint64_t{1} << 40) || total > (std::size_t{1} << 40) / v) {
      throw Error(Errc::Format, "implausible tensor dimension " + std::to_string(v));
    }
    d = static_cast<std::size_t>(v);
    total *= d;
  }
  return shape;
}

template <class T>
Tensor<T> get_payload(std::istream& in, ElementType stored, Shape shape) {
  const std::size_t n = shape_size(shape);
  if (stored == element_type_of<T>()) return Tensor<T>(std::move(shape), get_values<T>(in, n, "tensor payload"));
  if (stored == ElementType::F32) {
    const auto v = get_values<float>(in, n, "tensor payload");
    return Tensor<T>(std::move(shape), std::vector<T>(v.begin(), v.end()));
  }
  const auto v = get_values<double>(in, n, "tensor payload");
  return Tensor<T>(std::move(shape), std::vector<T>(v.begin(), v.end()));
}

ElementType parse_type(std::uint8_t tag) {
  if (tag > 1) throw Error(Errc::Format, "unknown element type tag " + std::to_string(tag));
  return static_cast<ElementType>(tag);
}

void expect_magic(std::istream& in, const char (&magic)[4], const char* what) {
  char got[4];
  read_exact(in, got, 4, what);
  if (std::memcmp(got, magic, 4) != 0) throw Error(Errc::Format, std::string("not a ") + what + " file (bad magic)");
}

std::string next_pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw Error(Errc::Format, "truncated PGM header");
  return tok;
}

std::size_t pgm_number(std::istream& in) {
  const auto tok = next_pgm_token(in);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(c); }) || tok.size() > 9) {
    throw Error(Errc::Format, "bad PGM header field '" + tok + "'");
  }
  return std::stoul(tok);
}

std::size_t idx_count(std::istream& in) { return get_be32(in, "IDX header"); }

}  // namespace

std::uint8_t quantize(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

Matrix<double> read_pgm(const fs::path& path) {
  auto in = open_in(path);
  if (next_pgm_token(in) != "P5") throw Error(Errc::Format, "'" + path.string() + "' is not a binary PGM (P5)");
  const std::size_t w = pgm_number(in), h = pgm_number(in), maxval = pgm_number(in);
  if (w == 0 || h == 0) throw Error(Errc::Format, "PGM with zero size");
  if (maxval != 255) throw Error(Errc::Format, "PGM maxval must be 255, got " + std::to_string(maxval));
  // exactly one whitespace byte already consumed after maxval
  std::vector<unsigned char> px(w * h);
  read_exact(in, px.data(), px.size(), "PGM pixels");
  Matrix<double> m(h, w);
  for (std::size_t i = 0; i < px.size(); ++i) m.data[i] = px[i] / 255.0;
  return m;
}

void write_pgm(const fs::path& path, const Matrix<double>& image) {
  if (image.rows == 0 || image.cols == 0) throw Error(Errc::ShapeMismatch, "cannot write an empty PGM");
  auto out = open_out(path);
  out << "P5\n" << image.cols << " " << image.rows << "\n255\n";
  std::vector<char> px(image.data.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<char>(quantize(image.data[i]));
  out.write(px.data(), static_cast<std::streamsize>(px.size()));
  finish(out, path);
}

std::string to_string(ElementType t) { return t == ElementType::F32 ? "f32" : "f64"; }

template <class T>
void write_tensor(std::ostream& out, const Tensor<T>& t) {
  if (t.rank() > 255) throw Error(Errc::ShapeMismatch, "tensor rank above 255");
  out.write(kTensorMagic, 4);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(element_type_of<T>()));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(t.rank()));
  for (std::size_t d : t.shape()) put_le<std::uint64_t>(out, d);
  put_values<T>(out, t.data());
}

template <class T>
void write_tensor(const fs::path& path, const Tensor<T>& t) {
  auto out = open_out(path);
  write_tensor(out, t);
  finish(out, path);
}

ElementType peek_tensor_type(const fs::path& path) {
  auto in = open_in(path);
  expect_magic(in, kTensorMagic, "WTN1 tensor");
  return parse_type(get_le<std::uint8_t>(in, "WTN1 header"));
}

template <class T>
Tensor<T> read_tensor(std::istream& in) {
  expect_magic(in, kTensorMagic, "WTN1 tensor");
  const auto type = parse_type(get_le<std::uint8_t>(in, "WTN1 header"));
  const auto rank = get_le<std::uint8_t>(in, "WTN1 header");
  auto t = get_payload<T>(in, type, get_dims(in, rank));
  if (in.peek() != EOF) throw Error(Errc::Format, "trailing bytes after WTN1 payload");
  return t;
}

template <class T>
Tensor<T> read_tensor(const fs::path& path) {
  auto in = open_in(path);
  return read_tensor<T>(in);
}

template void write_tensor(std::ostream&, const Tensor<float>&);
template void write_tensor(std::ostream&, const Tensor<double>&);
template void write_tensor(const fs::path&, const Tensor<float>&);
template void write_tensor(const fs::path&, const Tensor<double>&);
template Tensor<float> read_tensor(std::istream&);
template Tensor<double> read_tensor(std::istream&);
template Tensor<float> read_tensor(const fs::path&);
template Tensor<double> read_tensor(const fs::path&);

// IDX

Tensor<float> read_idx_images(const fs::path& path) {
  auto in = open_in(path);
  const auto magic = get_be32(in, "IDX header");
  if (magic != kIdxImages) throw Error(Errc::Format, "'" + path.string() + "' is not an IDX image file");
  const std::size_t n = idx_count(in), rows = idx_count(in), cols = idx_count(in);
  if (n == 0 || rows == 0 || cols == 0) throw Error(Errc::Format, "IDX image file with a zero dimension");
  std::vector<unsigned char> px(n * rows * cols);
  read_exact(in, px.data(), px.size(), "IDX pixels");
  Tensor<float> t({n, 1, rows, cols});
  for (std::size_t i = 0; i < px.size(); ++i) t[i] = static_cast<float>(px[i] / 255.0);
  return t;
}

std::vector<std::size_t> read_idx_labels(const fs::path& path) {
  auto in = open_in(path);
  const auto magic = get_be32(in, "IDX header");
  if (magic != kIdxLabels) throw Error(Errc::Format, "'" + path.string() + "' is not an IDX label file");
  const std::size_t n = idx_count(in);
  std::vector<unsigned char> raw(n);
  read_exact(in, raw.data(), n, "IDX labels");
  return std::vector<std::size_t>(raw.begin(), raw.end());
}

void write_idx_images(const fs::path& path, const Tensor<float>& images) {
  std::size_t n, h, w;
  if (images.rank() == 4 && images.dim(1) == 1) {
    n = images.dim(0), h = images.dim(2), w = images.dim(3);
  } else if (images.rank() == 3) {
    n = images.dim(0), h = images.dim(1), w = images.dim(2);
  } else {
    throw Error(Errc::ShapeMismatch, "IDX images must be [N,1,H,W] or [N,H,W], got " + shape_string(images.shape()));
  }
  auto out = open_out(path);
  put_be32(out, kIdxImages);
  put_be32(out, static_cast<std::uint32_t>(n));
  put_be32(out, static_cast<std::uint32_t>(h));
  put_be32(out, static_cast<std::uint32_t>(w));
  std::vector<char> px(images.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<char>(quantize(images[i]));
  out.write(px.data(), static_cast<std::streamsize>(px.size()));
  finish(out, path);
}

void write_idx_labels(const fs::path& path, const std::vector<std::size_t>& labels) {
  auto out = open_out(path);
  put_be32(out, kIdxLabels);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  for (std::size_t l : labels) {
    if (l > 255) throw Error(Errc::InvalidArgument, "IDX labels must fit in a byte");
    out.put(static_cast<char>(l));
  }
  finish(out, path);
}

Dataset load_idx(const fs::path& images, const fs::path& labels) {
  Dataset d{read_idx_images(images), read_idx_labels(labels)};
  if (d.images.dim(0) != d.labels.size()) {
    throw Error(Errc::Format, "IDX files disagree: " + std::to_string(d.images.dim(0)) + " images, " +
                                  std::to_string(d.labels.size()) + " labels");
  }
  return d;
}

void save_idx(const fs::path& images, const fs::path& labels, const Dataset& data) {
  write_idx_images(images, data.images);
  write_idx_labels(labels, data.labels);
}

// PGM directories

Dataset load_pgm_directory(const fs::path& dir, const fs::path& labels_csv) {
  std::istringstream csv(read_text(labels_csv));
  std::string line;
  if (!std::getline(csv, line)) throw Error(Errc::Format, "empty labels CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "file,label") throw Error(Errc::Format, "labels CSV must start with 'file,label'");
  std::vector<Matrix<double>> images;
  std::vector<std::size_t> labels;
  std::size_t line_no = 1;
  while (std::getline(csv, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    const std::string where = labels_csv.string() + ":" + std::to_string(line_no);
    if (comma == std::string::npos) throw Error(Errc::Format, where + ": expected file,label");
    const std::string label = line.substr(comma + 1);
    if (label.empty() || label.size() > 6 || !std::all_of(label.begin(), label.end(), [](char c) { return std::isdigit(c); })) {
      throw Error(Errc::Format, where + ": bad label '" + label + "'");
    }
    images.push_back(read_pgm(dir / line.substr(0, comma)));
    labels.push_back(std::stoul(label));
    if (images.back().rows != images.front().rows || images.back().cols != images.front().cols) {
      throw Error(Errc::Format, where + ": image size differs from the first image");
    }
  }
  if (images.empty()) throw Error(Errc::Format, "labels CSV lists no images");
  const std::size_t h = images.front().rows, w = images.front().cols;
  Tensor<float> t({images.size(), 1, h, w});
  for (std::size_t n = 0; n < images.size(); ++n) {
    std::transform(images[n].data.begin(), images[n].data.end(), t.plane(n, 0).begin(),
                   [](double v) { return static_cast<float>(v); });
  }
  return {std::move(t), std::move(labels)};
}

void save_pgm_directory(const fs::path& dir, const Dataset& data) {
  if (data.images.rank() != 4 || data.images.dim(1) != 1) {
    throw Error(Errc::ShapeMismatch, "PGM directories hold single-channel images");
  }
  fs::create_directories(dir);
  std::string csv = "file,label\n";
  const std::size_t h = data.images.dim(2), w = data.images.dim(3);
  for (std::size_t n = 0; n < data.size(); ++n) {
    char name[32];
    std::snprintf(name, sizeof name, "%05zu.pgm", n);
    const auto p = data.images.plane(n, 0);
    write_pgm(dir / name, Matrix<double>(h, w, std::vector<double>(p.begin(), p.end())));
    csv += std::string(name) + "," + std::to_string(data.labels.at(n)) + "\n";
  }
  write_text(dir / "labels.csv", csv);
}

Dataset load_dataset(const fs::path& images, const fs::path& labels) {
  if (fs::is_directory(images)) return load_pgm_directory(images, labels.empty() ? images / "labels.csv" : labels);
  if (labels.empty()) throw Error(Errc::InvalidArgument, "an IDX image file needs a label file");
  return load_idx(images, labels);
}

// Checkpoints

template <class T>
void save_checkpoint(std::ostream& out, nn::Model<T>& model) {
  const std::string config = nn::to_json(model.config()).dump();
  out.write(kCheckpointMagic, 4);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(element_type_of<T>()));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, config.size());
  out.write(config.data(), static_cast<std::streamsize>(config.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.layer_count()));
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    auto& layer = model.layer(i);
    std::vector<std::pair<std::string, const Tensor<T>*>> tensors;
    for (auto* p : layer.parameters()) tensors.emplace_back(p->name, &p->value);
    for (auto& [name, t] : layer.buffers()) tensors.emplace_back(name, t);
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(layer.kind()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) {
      put_le<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
      out.write(name.data(), static_cast<std::streamsize>(name.size()));
      put_le<std::uint8_t>(out, static_cast<std::uint8_t>(t->rank()));
      for (std::size_t d : t->shape()) put_le<std::uint64_t>(out, d);
      put_values<T>(out, t->data());
    }
  }
}

template <class T>
void save_checkpoint(const fs::path& path, nn::Model<T>& model) {
  auto out = open_out(path);
  save_checkpoint(out, model);
  finish(out, path);
}

ElementType checkpoint_type(const fs::path& path) {
  auto in = open_in(path);
  expect_magic(in, kCheckpointMagic, "WCN1 checkpoint");
  return parse_type(get_le<std::uint8_t>(in, "checkpoint header"));
}

template <class T>
nn::Model<T> load_checkpoint(std::istream& in) {
  expect_magic(in, kCheckpointMagic, "WCN1 checkpoint");
  const auto type = parse_type(get_le<std::uint8_t>(in, "checkpoint header"));
  if (type != element_type_of<T>()) {
    throw Error(Errc::Format, "checkpoint holds " + to_string(type) + " weights, expected " +
                                  to_string(element_type_of<T>()));
  }
  const auto version = get_le<std::uint32_t>(in, "checkpoint header");
  if (version != kCheckpointVersion) throw Error(Errc::Format, "unsupported checkpoint version " + std::to_string(version));
  const auto config_len = get_le<std::uint64_t>(in, "checkpoint header");
  if (config_len > (1u << 24)) throw Error(Errc::Format, "implausible config length");
  std::string config(config_len, '\0');
  read_exact(in, config.data(), config.size(), "checkpoint config");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(config);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Format, std::string("checkpoint config is not JSON: ") + e.what());
  }
  nn::Model<T> model(nn::model_config_from_json(j));
  const auto layers = get_le<std::uint32_t>(in, "layer table");
  if (layers != model.layer_count()) throw Error(Errc::Format, "layer count does not match the stored config");
  for (std::size_t i = 0; i < layers; ++i) {
    auto& layer = model.layer(i);
    const std::string where = "layer " + std::to_string(i);
    if (get_le<std::uint8_t>(in, "layer table") != static_cast<std::uint8_t>(layer.kind())) {
      throw Error(Errc::Format, where + ": kind does not match the stored config");
    }
    std::vector<std::pair<std::string, Tensor<T>*>> tensors;
    for (auto* p : layer.parameters()) tensors.emplace_back(p->name, &p->value);
    for (auto& b : layer.buffers()) tensors.push_back(b);
    if (get_le<std::uint32_t>(in, "layer table") != tensors.size()) {
      throw Error(Errc::Format, where + ": unexpected tensor count");
    }
    for (auto& [name, t] : tensors) {
      std::string got(get_le<std::uint16_t>(in, "tensor name"), '\0');
      read_exact(in, got.data(), got.size(), "tensor name");
      if (got != name) throw Error(Errc::Format, where + ": expected tensor '" + name + "', found '" + got + "'");
      const auto shape = get_dims(in, get_le<std::uint8_t>(in, "tensor rank"));
      if (shape != t->shape()) {
        throw Error(Errc::Format, where + ": " + name + " has shape " + shape_string(shape) + ", expected " +
                                      shape_string(t->shape()));
      }
      *t = get_payload<T>(in, type, shape);
    }
  }
  if (in.peek() != EOF) throw Error(Errc::Format, "trailing bytes after checkpoint");
  return model;
}

template <class T>
nn::Model<T> load_checkpoint(const fs::path& path) {
  auto in = open_in(path);
  return load_checkpoint<T>(in);
}

template void save_checkpoint(std::ostream&, nn::Model<float>&);
template void save_checkpoint(std::ostream&, nn::Model<double>&);
template void save_checkpoint(const fs::path&, nn::Model<float>&);
template void save_checkpoint(const fs::path&, nn::Model<double>&);
template nn::Model<float> load_checkpoint(std::istream&);
template nn::Model<double> load_checkpoint(std::istream&);
template nn::Model<float> load_checkpoint(const fs::path&);
template nn::Model<double> load_checkpoint(const fs::path&);

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

}  // namespace wavecnet::io
