#include "cli.hpp"

int main(int argc, char** argv) { return flowgebd::cli::run_cli(argc, argv); }
