#include "alphamod/cli.hpp"

int main(int argc, char** argv) { return alphamod::cli_main(argc, argv); }
