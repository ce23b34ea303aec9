#include "jointsub/cli.hpp"

int main(int argc, char** argv) { return jointsub::cli_main(argc, argv); }
