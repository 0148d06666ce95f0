#include "qpurity/cli.hpp"

int main(int argc, char** argv) { return qpurity::run_command(argc, argv); }
