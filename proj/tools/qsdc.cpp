#include "qsdc/harness.hpp"

int main(int argc, char** argv) { return qsdc::cli_run(argc, argv); }
