#include "peerrank/cli.hpp"

int main(int argc, char** argv) { return peerrank::run(argc, argv); }
