// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "wavecnet/dataset.hpp"
#include "wavecnet/nn/model.hpp"
#include "wavecnet/tensor.hpp"

// File formats. All readers throw Error(Io) when a file cannot be opened
// and Error(Format) on malformed content.
namespace wavecnet::io {

namespace fs = std::filesystem;

// PGM, binary P5 with maxval 255. Pixels map to [0, 1] by /255; writing
// clamps to [0, 1] and rounds to the nearest level.
Matrix<double> read_pgm(const fs::path& path);
void write_pgm(const fs::path& path, const Matrix<double>& image);
std::uint8_t quantize(double v);

// WTN1 raw tensors: "WTN1", u8 type (0 f32, 1 f64), u8 rank, rank
// little-endian u64 dims, row-major little-endian payload.
enum class ElementType : std::uint8_t { F32 = 0, F64 = 1 };

template <class T>
constexpr ElementType element_type_of() {
  return sizeof(T) == 4 ? ElementType::F32 : ElementType::F64;
}

std::string to_string(ElementType t);

template <class T>
void write_tensor(std::ostream& out, const Tensor<T>& t);
template <class T>
void write_tensor(const fs::path& path, const Tensor<T>& t);

ElementType peek_tensor_type(const fs::path& path);
/// Converts when the stored element type differs from T.
template <class T>
Tensor<T> read_tensor(std::istream& in);
template <class T>
Tensor<T> read_tensor(const fs::path& path);

// IDX. Images (magic 0x00000803, dims [count, rows, cols], u8 pixels) load as
// [N, 1, rows, cols] floats in [0, 1]; labels use magic 0x00000801.
Tensor<float> read_idx_images(const fs::path& path);
std::vector<std::size_t> read_idx_labels(const fs::path& path);
/// Single-channel [N, 1, H, W] or [N, H, W] images.
void write_idx_images(const fs::path& path, const Tensor<float>& images);
void write_idx_labels(const fs::path& path, const std::vector<std::size_t>& labels);

Dataset load_idx(const fs::path& images, const fs::path& labels);
void save_idx(const fs::path& images, const fs::path& labels, const Dataset& data);

// Directory of same-sized PGM files plus a CSV with header "file,label";
// file names are relative to the directory.
Dataset load_pgm_directory(const fs::path& dir, const fs::path& labels_csv);
/// Writes NNNNN.pgm files and labels.csv into dir (created if missing).
void save_pgm_directory(const fs::path& dir, const Dataset& data);

/// Picks the loader from the path: an IDX image file needs `labels`; a
/// directory uses `labels` or dir/labels.csv.
Dataset load_dataset(const fs::path& images, const fs::path& labels = {});

// WCN1 checkpoints; the layout is described in docs/checkpoint_format.md.
inline constexpr std::uint32_t kCheckpointVersion = 1;

template <class T>
void save_checkpoint(std::ostream& out, nn::Model<T>& model);
template <class T>
void save_checkpoint(const fs::path& path, nn::Model<T>& model);

ElementType checkpoint_type(const fs::path& path);
/// Throws Format when the stored element type is not T or the layer table
/// does not match the stored configuration.
template <class T>
nn::Model<T> load_checkpoint(std::istream& in);
template <class T>
nn::Model<T> load_checkpoint(const fs::path& path);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace wavecnet::io
