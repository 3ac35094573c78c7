#include "shapepde/studies.hpp"

int main(int argc, char** argv) { return shapepde::run_cli(argc, argv); }
