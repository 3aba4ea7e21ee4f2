#include "discharge/commands.hpp"

int main(int argc, char** argv) { return discharge::run_command(argc, argv); }
