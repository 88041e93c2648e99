#include "cli.hpp"

int main(int argc, char** argv) { return oscdet::run(argc, argv); }
