// Copyright 2026 texrecon contributors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

int main(int argc, char** argv) { return texrecon::cli::run(argc, argv); }
