#include "cli.hpp"

int main(int argc, char** argv) { return gspt::cli::run_cli(argc, argv); }
