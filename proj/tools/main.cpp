// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "soup_cli.hpp"

int main(int argc, char** argv) { return soup::cli::run(argc, argv, std::cout, std::cerr); }
