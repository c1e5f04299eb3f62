#include "stochmatch/cli.hpp"

int main(int argc, char** argv) { return stochmatch::cli_main(argc, argv); }
