#include "endcycle/cli.hpp"

int main(int argc, char** argv) { return endcycle::cli::run(argc, argv); }
