#include "pinflow/cli.hpp"

int main(int argc, char** argv) { return pinflow::cli_main(argc, argv); }
