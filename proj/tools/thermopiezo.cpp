#include "thermopiezo/cli.hpp"

int main(int argc, char **argv) { return thermopiezo::cli::run_cli(argc, argv); }
