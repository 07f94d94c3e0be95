#include "augbench/cli.hpp"

int main(int argc, char** argv) { return augbench::dispatch(argc, argv); }
