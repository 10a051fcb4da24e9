#include "pipeline/cli.hpp"

int main(int argc, char** argv) { return framecast::pipe::cli_main(argc, argv); }
