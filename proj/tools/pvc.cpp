#include "pvc/harness.hpp"

int main(int argc, char** argv) { return pvc::run_cli(argc, argv); }
