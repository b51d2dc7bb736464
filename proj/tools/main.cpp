// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "vtprune/io/cli.hpp"

int main(int argc, char** argv) { return vtprune::io::run_cli(argc, argv, std::cout, std::cerr); }
