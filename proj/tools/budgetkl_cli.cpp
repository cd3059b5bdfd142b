#include "budgetkl/bench.hpp"

int main(int argc, char** argv) { return budgetkl::cli::main(argc, argv); }
