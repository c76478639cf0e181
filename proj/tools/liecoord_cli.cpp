#include "liecoord/cli.hpp"

int main(int argc, char** argv) { return liecoord::cli_main(argc, argv); }
