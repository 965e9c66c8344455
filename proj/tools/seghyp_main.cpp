#include "seghyp/cli.hpp"

int main(int argc, char** argv) { return seghyp::run_cli(argc, argv); }
