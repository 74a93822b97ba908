#include "prunetx/cli.hpp"

int main(int argc, char** argv) { return prunetx::run_cli(argc, argv); }
