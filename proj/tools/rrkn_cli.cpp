#include "rrkn/run_spec.hpp"

int main(int argc, char** argv) { return rrkn::cli::run_main(argc, argv); }
