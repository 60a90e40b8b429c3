#include "minsurf/cli.hpp"

int main(int argc, char** argv) { return minsurf::cli::run(argc, argv); }
