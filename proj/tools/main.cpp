#include <vector>

#include "mmeq/cli.hpp"

int main(int argc, char** argv) {
    return mmeq::cli::run_command(std::vector<std::string>(argv + 1, argv + argc));
}
