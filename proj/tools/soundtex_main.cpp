// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#include "soundtex/cli.hpp"

int main(int argc, char** argv) { return soundtex::run_cli(argc, argv); }
