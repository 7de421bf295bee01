#include "quartic/cli.hpp"

int main(int argc, char** argv) { return quartic::cli::run(argc, argv); }
