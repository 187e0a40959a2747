#include "polarfit/cli.hpp"

int main(int argc, char** argv) {
    return polarfit::cli::run({argv + 1, argv + argc});
}
