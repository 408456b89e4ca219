#include "hetnet/cli.hpp"

int main(int argc, char** argv) { return hetnet::run_command(argc, argv); }
