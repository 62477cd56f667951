#include "dunesim/cli.hpp"

int main(int argc, char** argv) { return dunesim::cli_main(argc, argv); }
