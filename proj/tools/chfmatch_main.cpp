#include "chfmatch/harness.hpp"

int main(int argc, char** argv) { return chfmatch::cli_main(argc, argv); }
