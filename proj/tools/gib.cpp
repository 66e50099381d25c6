#include "gib/cli.hpp"

int main(int argc, char** argv) { return gib::cli::run(argc, argv); }
