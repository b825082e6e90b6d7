#include "clusterface/cli.hpp"

int main(int argc, char** argv) { return clusterface::run_command(argc, argv); }
