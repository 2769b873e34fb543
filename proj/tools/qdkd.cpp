#include "qdkd/cli.hpp"

int main(int argc, char** argv) { return qdkd::cli::main(argc, argv); }
