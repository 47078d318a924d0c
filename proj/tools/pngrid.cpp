#include "pngrid/cli.hpp"

int main(int argc, char** argv) { return pngrid::run_cli(argc, argv); }
