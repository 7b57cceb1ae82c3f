// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include <iostream>

#include "wavecnet/cli.hpp"

int main(int argc, char** argv) { return wavecnet::cli::run(argc, argv, std::cout, std::cerr); }
