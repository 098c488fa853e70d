// SPDX-License-Identifier: MIT
#include "dppmix/cli.hpp"

int main(int argc, char** argv) { return dppmix::cli::run(argc, argv); }
