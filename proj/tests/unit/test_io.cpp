// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "wavecnet/error.hpp"
#include "wavecnet/io.hpp"
#include "wavecnet/nn/train.hpp"
#include "wavecnet/synthetic.hpp"

using namespace wavecnet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("wavecnet_io_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

std::string bytes_of(const fs::path& p) { return io::read_text(p); }

template <class T>
bool bit_equal(const Tensor<T>& a, const Tensor<T>& b) {
  return a.shape() == b.shape() && std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(T)) == 0;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("WTN1 layout is byte-exact") {
  const Tensor<float> t({2, 1}, std::vector<float>{1.0f, -2.5f});
  std::ostringstream os;
  io::write_tensor(os, t);
  const std::string s = os.str();
  REQUIRE(s.size() == 4 + 1 + 1 + 16 + 8);
  CHECK(s.substr(0, 4) == "WTN1");
  CHECK(s[4] == 0);
  CHECK(s[5] == 2);
  CHECK(static_cast<unsigned char>(s[6]) == 2);
  for (int i = 7; i < 14; ++i) CHECK(s[i] == 0);
  CHECK(static_cast<unsigned char>(s[14]) == 1);
  // 1.0f = 0x3f800000, little-endian
  CHECK(static_cast<unsigned char>(s[22]) == 0x00);
  CHECK(static_cast<unsigned char>(s[25]) == 0x3f);
  CHECK(static_cast<unsigned char>(s[24]) == 0x80);
}

TEST_CASE("WTN1 round trips bit-exactly") {
  TempDir dir;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 1e3);
  Tensor<double> d({3, 4, 5});
  for (auto& v : d.storage()) v = n(rng);
  d[0] = std::numeric_limits<double>::denorm_min();
  d[1] = -0.0;
  d[2] = std::numeric_limits<double>::infinity();
  io::write_tensor(dir / "d.wtn", d);
  CHECK(bit_equal(io::read_tensor<double>(dir / "d.wtn"), d));
  CHECK(io::peek_tensor_type(dir / "d.wtn") == io::ElementType::F64);

  const auto f = d.cast<float>();
  io::write_tensor(dir / "f.wtn", f);
  CHECK(bit_equal(io::read_tensor<float>(dir / "f.wtn"), f));
  // widening conversion on read is exact
  CHECK(io::read_tensor<double>(dir / "f.wtn") == f.cast<double>());
}

TEST_CASE("malformed WTN1 files") {
  TempDir dir;
  io::write_text(dir / "bad", "WTN2abc");
  CHECK(code_of([&] { io::read_tensor<float>(dir / "bad"); }) == Errc::Format);
  io::write_tensor(dir / "ok", Tensor<float>({4}, 1.0f));
  auto s = bytes_of(dir / "ok");
  io::write_text(dir / "short", s.substr(0, s.size() - 1));
  CHECK(code_of([&] { io::read_tensor<float>(dir / "short"); }) == Errc::Format);
  io::write_text(dir / "long", s + "x");
  CHECK(code_of([&] { io::read_tensor<float>(dir / "long"); }) == Errc::Format);
  s[4] = 7;
  io::write_text(dir / "tag", s);
  CHECK(code_of([&] { io::read_tensor<float>(dir / "tag"); }) == Errc::Format);
  CHECK(code_of([&] { io::read_tensor<float>(dir / "missing"); }) == Errc::Io);
}

TEST_CASE("PGM round trip and quantization") {
  TempDir dir;
  Matrix<double> m(3, 5);
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = static_cast<double>(i * 17 % 256) / 255.0;
  io::write_pgm(dir / "a.pgm", m);
  const auto header = bytes_of(dir / "a.pgm").substr(0, 11);
  CHECK(header == "P5\n5 3\n255\n");
  const auto back = io::read_pgm(dir / "a.pgm");
  CHECK(back.rows == 3);
  CHECK(back.cols == 5);
  for (std::size_t i = 0; i < m.data.size(); ++i) CHECK(io::quantize(back.data[i]) == io::quantize(m.data[i]));
  CHECK(io::quantize(-0.2) == 0);
  CHECK(io::quantize(1.7) == 255);
  CHECK(io::quantize(0.5 / 255.0 + 1e-9) == 1);
  CHECK(io::quantize(std::nan("")) == 0);
}

TEST_CASE("PGM header comments and errors") {
  TempDir dir;
  io::write_text(dir / "c.pgm", std::string("P5\n# made by hand\n2 1\n255\n") + '\x00' + '\xff');
  const auto m = io::read_pgm(dir / "c.pgm");
  CHECK(m.data == std::vector<double>{0.0, 1.0});
  io::write_text(dir / "p2.pgm", "P2\n1 1\n255\n0\n");
  CHECK(code_of([&] { io::read_pgm(dir / "p2.pgm"); }) == Errc::Format);
  io::write_text(dir / "max.pgm", std::string("P5\n1 1\n65535\n") + "\x00\x01");
  CHECK(code_of([&] { io::read_pgm(dir / "max.pgm"); }) == Errc::Format);
  io::write_text(dir / "trunc.pgm", "P5\n4 4\n255\nab");
  CHECK(code_of([&] { io::read_pgm(dir / "trunc.pgm"); }) == Errc::Format);
}

TEST_CASE("IDX round trip and header layout") {
  TempDir dir;
  const auto data = make_glyph_dataset(12, 3);
  io::save_idx(dir / "img.idx", dir / "lbl.idx", data);
  const auto img = bytes_of(dir / "img.idx");
  CHECK(img.substr(0, 4) == std::string("\x00\x00\x08\x03", 4));
  CHECK(img.substr(4, 4) == std::string("\x00\x00\x00\x0c", 4));
  CHECK(img.size() == 16 + 12 * 28 * 28);
  CHECK(bytes_of(dir / "lbl.idx").substr(0, 4) == std::string("\x00\x00\x08\x01", 4));
  const auto back = io::load_dataset(dir / "img.idx", dir / "lbl.idx");
  CHECK(back.labels == data.labels);
  CHECK(back.images.shape() == data.images.shape());
  for (std::size_t i = 0; i < data.images.size(); ++i) {
    CHECK(io::quantize(back.images[i]) == io::quantize(data.images[i]));
  }
  // A second write of what was read is identical on disk.
  io::save_idx(dir / "img2.idx", dir / "lbl2.idx", back);
  CHECK(bytes_of(dir / "img2.idx") == img);
  CHECK(code_of([&] { io::read_idx_images(dir / "lbl.idx"); }) == Errc::Format);
  CHECK(code_of([&] { io::load_dataset(dir / "img.idx"); }) == Errc::InvalidArgument);
  io::write_idx_labels(dir / "few.idx", {1, 2});
  CHECK(code_of([&] { io::load_idx(dir / "img.idx", dir / "few.idx"); }) == Errc::Format);
}

TEST_CASE("PGM directory datasets") {
  TempDir dir;
  const auto data = make_glyph_dataset(5, 8);
  io::save_pgm_directory(dir / "set", data);
  const auto back = io::load_dataset(dir / "set");
  CHECK(back.labels == data.labels);
  for (std::size_t i = 0; i < data.images.size(); ++i) {
    CHECK(io::quantize(back.images[i]) == io::quantize(data.images[i]));
  }
  io::write_text(dir / "set" / "bad.csv", "file,label\n00000.pgm,x\n");
  CHECK(code_of([&] { io::load_pgm_directory(dir / "set", dir / "set" / "bad.csv"); }) == Errc::Format);
  io::write_text(dir / "set" / "hdr.csv", "name,y\n");
  CHECK(code_of([&] { io::load_pgm_directory(dir / "set", dir / "set" / "hdr.csv"); }) == Errc::Format);
}

TEST_CASE("checkpoints restore the exact model") {
  TempDir dir;
  const auto data = make_glyph_dataset(64, 2);
  auto cfg = nn::wavecnet_mini(nn::DownsampleMode::dwt_ll("db2"), 5);
  nn::Model<float> model(cfg);
  nn::TrainConfig tc;
  tc.epochs = 1;
  tc.batch = 32;
  nn::train(model, data, nullptr, tc);
  io::save_checkpoint(dir / "m.wcn", model);
  CHECK(io::checkpoint_type(dir / "m.wcn") == io::ElementType::F32);
  auto back = io::load_checkpoint<float>(dir / "m.wcn");
  CHECK(back.config() == model.config());
  CHECK(back.checksum() == model.checksum());
  const auto a = model.infer(data.images), b = back.infer(data.images);
  CHECK(bit_equal(a, b));
  // Saving the loaded model reproduces the file.
  io::save_checkpoint(dir / "m2.wcn", back);
  CHECK(bytes_of(dir / "m2.wcn") == bytes_of(dir / "m.wcn"));
  CHECK(code_of([&] { io::load_checkpoint<double>(dir / "m.wcn"); }) == Errc::Format);
}

TEST_CASE("checkpoint layout header") {
  nn::Model<double> model(nn::wavecnet_mini(nn::DownsampleMode::max_pool()));
  std::ostringstream os;
  io::save_checkpoint(os, model);
  const std::string s = os.str();
  CHECK(s.substr(0, 4) == "WCN1");
  CHECK(s[4] == 1);
  CHECK(s[5] == 1);
  std::uint64_t len = 0;
  for (int i = 0; i < 8; ++i) len |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[9 + i])) << (8 * i);
  const auto j = nlohmann::json::parse(s.substr(17, len));
  CHECK(nn::model_config_from_json(j) == model.config());
}

TEST_CASE("corrupted checkpoints are rejected") {
  nn::Model<float> model(nn::wavecnet_mini(nn::DownsampleMode::avg_pool()));
  std::ostringstream os;
  io::save_checkpoint(os, model);
  const std::string good = os.str();
  SUBCASE("truncated") {
    std::istringstream in(good.substr(0, good.size() - 3));
    CHECK(code_of([&] { io::load_checkpoint<float>(in); }) == Errc::Format);
  }
  SUBCASE("renamed tensor") {
    std::string s = good;
    const auto pos = s.find("weight");
    s[pos] = 'W';
    std::istringstream in(s);
    CHECK(code_of([&] { io::load_checkpoint<float>(in); }) == Errc::Format);
  }
  SUBCASE("bad magic") {
    std::istringstream in("WCN0" + good.substr(4));
    CHECK(code_of([&] { io::load_checkpoint<float>(in); }) == Errc::Format);
  }
}
