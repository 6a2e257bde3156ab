#include "cli.hpp"

int main(int argc, char** argv) { return fuvar::cli::run_cli(argc, argv); }
