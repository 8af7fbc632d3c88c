#include "cylflow/harness.hpp"

int main(int argc, char** argv) { return cylflow::cli_main(argc, argv); }
