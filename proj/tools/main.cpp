#include "copspec/cli.hpp"

int main(int argc, char** argv) { return copspec::cli_dispatch(argc, argv); }
