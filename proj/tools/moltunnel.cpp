#include "moltunnel/cli.hpp"

int main(int argc, char** argv) { return moltunnel::cli::run_cli(argc, argv); }
