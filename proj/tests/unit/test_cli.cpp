// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include <random>
#include <sstream>

#include "doctest.h"
#include "wavecnet/cli.hpp"
#include "wavecnet/io.hpp"
#include "wavecnet/synthetic.hpp"

using namespace wavecnet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("wavecnet_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// Glyph train/validation sets as IDX files.
void write_glyphs(const TempDir& dir, std::size_t train, std::size_t val) {
  io::save_idx(dir / "train.idx", dir / "train_labels.idx", make_glyph_dataset(train, 1));
  io::save_idx(dir / "val.idx", dir / "val_labels.idx", make_glyph_dataset(val, 2));
}

}  // namespace

TEST_CASE("filters prints one row per coefficient") {
  const auto r = run({"filters", "--wavelet", "haar"});
  CHECK(r.code == 0);
  CHECK(count_lines(r.out) == 3);
  CHECK(r.out.rfind("index,analysis_low,analysis_high,synthesis_low,synthesis_high\n", 0) == 0);
  CHECK(count_lines(run({"filters", "--wavelet", "db4"}).out) == 9);
  CHECK(run({"filters", "--wavelet", "ch3.3", "--check"}).code == 0);
  const auto bad = run({"filters", "--wavelet", "db9"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("UnknownWavelet") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 1);
  CHECK(run({"nonsense"}).code == 1);
  CHECK(run({"filters"}).code == 1);
  CHECK(run({"filters", "--wavelet", "haar", "--bogus"}).code == 1);
  CHECK(run({"--precision", "f16", "filters", "--wavelet", "haar"}).code == 1);
  CHECK(run({"flops", "--input", "1x0x28"}).code == 1);
  CHECK(run({"transform", "--in", "/nonexistent/a.pgm", "--out-prefix", "x"}).code == 2);
}

TEST_CASE("every subcommand documents itself") {
  for (const char* sub : {"filters", "transform", "idwt", "denoise", "train", "eval", "robustness", "shift", "flops"}) {
    INFO(sub);
    const auto r = run({sub, "--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("--seed") != std::string::npos);
    CHECK(r.out.find("--threads") != std::string::npos);
    CHECK(r.err.empty());
  }
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("transform then idwt restores even-sized PGM images") {
  TempDir dir;
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> px(0, 255);
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{8, 8}, {28, 28}, {6, 10}, {64, 32}}) {
    Matrix<double> img(h, w);
    for (auto& v : img.data) v = px(rng) / 255.0;
    io::write_pgm(dir / "in.pgm", img);
    REQUIRE(run({"transform", "--wavelet", "haar", "--in", dir / "in.pgm", "--out-prefix", dir / "x"}).code == 0);
    CHECK(io::read_tensor<double>(dir / "x_ll.wtn").shape() == Shape{h / 2, w / 2});
    const std::string shape = std::to_string(h) + "x" + std::to_string(w);
    REQUIRE(run({"idwt", "--wavelet", "haar", "--in-prefix", dir / "x", "--shape", shape, "--out", dir / "out.pgm"})
                .code == 0);
    CHECK(io::read_text(dir / "out.pgm") == io::read_text(dir / "in.pgm"));
  }
}

TEST_CASE("transform of a batch tensor keeps the batch layout") {
  TempDir dir;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 1);
  Tensor<double> t({2, 3, 8, 6});
  for (auto& v : t.storage()) v = n(rng);
  io::write_tensor(dir / "t.wtn", t);
  REQUIRE(run({"transform", "--wavelet", "db2", "--in", dir / "t.wtn", "--out-prefix", dir / "b"}).code == 0);
  CHECK(io::read_tensor<double>(dir / "b_hh.wtn").shape() == Shape{2, 3, 4, 3});
  REQUIRE(run({"idwt", "--wavelet", "db2", "--in-prefix", dir / "b", "--out", dir / "r.wtn"}).code == 0);
  CHECK(io::read_tensor<double>(dir / "r.wtn").shape() == t.shape());
  REQUIRE(run({"--precision", "f32", "transform", "--in", dir / "t.wtn", "--out-prefix", dir / "f"}).code == 0);
  CHECK(io::peek_tensor_type(dir / "f_ll.wtn") == io::ElementType::F32);
  CHECK(run({"idwt", "--in-prefix", dir / "b", "--shape", "8", "--out", dir / "r.wtn"}).code == 1);
}

TEST_CASE("denoise writes an image of the same size") {
  TempDir dir;
  const auto clean = smooth_test_image(16, 16, 2);
  io::write_pgm(dir / "a.pgm", clean);
  REQUIRE(run({"denoise", "--in", dir / "a.pgm", "--out", dir / "b.pgm", "--lambda", "0"}).code == 0);
  CHECK(io::read_text(dir / "b.pgm") == io::read_text(dir / "a.pgm"));
  CHECK(run({"denoise", "--in", dir / "a.pgm", "--out", dir / "b.pgm", "--lambda", "-1"}).code == 2);
}

TEST_CASE("flops reports the wavelet share") {
  TempDir dir;
  io::write_text(dir / "model.json", R"({"architecture": "wavecnet-mini", "downsample": "dwt_ll:haar"})");
  const auto r = run({"flops", "--config", dir / "model.json", "--input", "1x1x28x28"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.contains("ratio"));
  CHECK(j["ratio"].get<double>() > 0.0);
  const auto pooled = nlohmann::json::parse(run({"flops", "--downsample", "max_pool"}).out);
  CHECK(pooled["ratio"].get<double>() == 0.0);
  io::write_text(dir / "bad.json", R"({"architecture": "wavecnet-mini", "colour": 1})");
  CHECK(run({"flops", "--config", dir / "bad.json"}).code == 2);
}

TEST_CASE("train, eval, robustness and shift are deterministic") {
  TempDir dir;
  write_glyphs(dir, 300, 100);
  const std::vector<std::string> train_args{"--seed",        "5",          "train",   "--train-images",
                                            dir / "train.idx", "--train-labels", dir / "train_labels.idx",
                                            "--val-images", dir / "val.idx", "--val-labels", dir / "val_labels.idx",
                                            "--epochs",     "2",          "--quiet"};
  auto a_args = train_args, b_args = train_args;
  a_args.insert(a_args.end(), {"--checkpoint", dir / "a.wcn"});
  b_args.insert(b_args.end(), {"--checkpoint", dir / "b.wcn"});
  const auto a = run(a_args), b = run(b_args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(count_lines(a.out) == 3);
  CHECK(io::read_text(dir / "a.wcn") == io::read_text(dir / "b.wcn"));

  SUBCASE("config file and flags agree") {
    io::write_text(dir / "run.json", nlohmann::json{{"seed", 5},
                                                    {"train_images", dir / "train.idx"},
                                                    {"train_labels", dir / "train_labels.idx"},
                                                    {"val_images", dir / "val.idx"},
                                                    {"val_labels", dir / "val_labels.idx"},
                                                    {"epochs", 2},
                                                    {"quiet", true},
                                                    {"checkpoint", dir / "c.wcn"}}
                                         .dump());
    const auto c = run({"train", "--config", dir / "run.json"});
    CHECK(c.out == a.out);
    CHECK(io::read_text(dir / "c.wcn") == io::read_text(dir / "a.wcn"));
  }
  SUBCASE("eval over threads") {
    const auto e1 = run({"eval", "--checkpoint", dir / "a.wcn", "--images", dir / "val.idx", "--labels",
                         dir / "val_labels.idx"});
    const auto e4 = run({"--threads", "4", "eval", "--checkpoint", dir / "a.wcn", "--images", dir / "val.idx",
                         "--labels", dir / "val_labels.idx"});
    CHECK(e1.code == 0);
    CHECK(e1.out == e4.out);
    CHECK(e1.out.rfind("count,loss,accuracy,error\n100,", 0) == 0);
  }
  SUBCASE("robustness against a reference") {
    const std::vector<std::string> base{"robustness", "--checkpoint", dir / "a.wcn", "--images", dir / "val.idx",
                                        "--labels", dir / "val_labels.idx"};
    auto ref_args = base;
    ref_args.insert(ref_args.end(), {"--errors-csv", dir / "ref.csv"});
    REQUIRE(run(ref_args).code == 0);
    auto rep_args = base;
    rep_args.insert(rep_args.end(), {"--reference", dir / "ref.csv", "--out-json", dir / "rep.json"});
    const auto r1 = run(rep_args), r2 = run(rep_args);
    CHECK(r1.code == 0);
    CHECK(r1.out == r2.out);
    const auto rep = nlohmann::json::parse(io::read_text(dir / "rep.json"));
    CHECK(rep["mce"]["noise"].get<double>() == 100.0);
    auto missing = base;
    missing.insert(missing.end(), {"--reference", dir / "nope.csv"});
    CHECK(run(missing).code == 2);
  }
  SUBCASE("shift consistency") {
    const std::vector<std::string> args{"shift", "--checkpoint", dir / "a.wcn", "--images", dir / "val.idx",
                                        "--pairs", "4", "--range", "3"};
    const auto s1 = run(args), s2 = run(args);
    CHECK(s1.code == 0);
    CHECK(s1.out == s2.out);
    const double v = nlohmann::json::parse(s1.out)["consistency"].get<double>();
    CHECK(v >= 0.0);
    CHECK(v <= 100.0);
    auto far = args;
    far.insert(far.end(), {"--range", "40"});
    CHECK(run(far).code == 2);
  }
}
