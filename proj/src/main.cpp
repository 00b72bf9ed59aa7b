#include "superres/cli_runner.hpp"

int main(int argc, char** argv) { return superres::run_cli(argc, argv); }
