#include "cfhom/driver.hpp"

int main(int argc, char** argv) { return cfhom::run_command_line(argc, argv); }
