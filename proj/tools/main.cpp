#include "stodec/cli.hpp"

int main(int argc, char** argv) { return stodec::cli_main(argc, argv); }
