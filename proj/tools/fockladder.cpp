// fockladder.cpp — command-line entry point

#include "fockladder/cli.hpp"

int main(int argc, char** argv) { return fockladder::cli::main(argc, argv); }
