// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

// Writes the synthetic 10-class glyph set as IDX files or a PGM directory.

#include <CLI11.hpp>
#include <iostream>

#include "wavecnet/error.hpp"
#include "wavecnet/io.hpp"
#include "wavecnet/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate 28x28 digit-like glyph datasets", "wavecnet-glyphs"};
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  std::string images, labels, pgm_dir;
  app.add_option("--count", count, "number of samples")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "generator seed")->capture_default_str();
  app.add_option("--images", images, "IDX image file to write");
  app.add_option("--labels", labels, "IDX label file to write");
  app.add_option("--pgm-dir", pgm_dir, "write a PGM directory with labels.csv instead");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (pgm_dir.empty() && (images.empty() || labels.empty())) {
    std::cerr << "usage error: give --images and --labels, or --pgm-dir\n";
    return 1;
  }
  try {
    const auto data = wavecnet::make_glyph_dataset(count, seed);
    if (!pgm_dir.empty()) {
      wavecnet::io::save_pgm_directory(pgm_dir, data);
    } else {
      wavecnet::io::save_idx(images, labels, data);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
