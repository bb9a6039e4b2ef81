#include "crtsim/cli.hpp"

int main(int argc, char** argv) { return crtsim::run_cli(argc, argv); }
