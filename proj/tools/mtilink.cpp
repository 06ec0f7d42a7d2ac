#include "mtilink/cli.hpp"

int main(int argc, char** argv) { return mtilink::cli::run(argc, argv); }
