#include "ma3d_tools/cli.hpp"

int main(int argc, char** argv) { return ma3d::tools::cli_main(argc, argv); }
