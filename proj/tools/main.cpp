#include "bessim/cli.hpp"

int main(int argc, char** argv) { return bessim::cli_main(argc, argv); }
