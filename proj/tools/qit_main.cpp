#include "qit/cli.hpp"

int main(int argc, char** argv) { return qit::cli::run(argc, argv); }
