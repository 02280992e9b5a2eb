// SPDX-License-Identifier: Apache-2.0

#include "tsel/cli.hpp"

int main(int argc, char** argv) { return tsel::cli::run(argc, argv); }
