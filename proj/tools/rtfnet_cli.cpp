#include "rtfnet/cli.hpp"

int main(int argc, char** argv) { return rtfnet::run_cli(argc, argv); }
