#include "sfa/cli.hpp"

int main(int argc, char** argv) { return sfa::run_cli(argc, argv); }
