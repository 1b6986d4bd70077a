#include "covertkit/cli.hpp"

int main(int argc, char** argv) { return covertkit::cli::run_cli(argc, argv); }
