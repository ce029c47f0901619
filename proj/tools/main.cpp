#include <delaystab/cli.hpp>

int main(int argc, char** argv) { return delaystab::run_cli(argc, argv); }
