#include "opttree/cli.hpp"

int main(int argc, char** argv) { return opttree::run_cli(argc, argv); }
