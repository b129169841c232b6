#include "volalab/cli/commands.hpp"

int main(int argc, char** argv) {
    return volalab::cli::run(argc, argv);
}
