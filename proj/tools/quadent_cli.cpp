#include <iostream>

#include "quadent/report.hpp"

int main(int argc, char** argv) {
    return quadent::report::run_command(argc, argv, std::cout, std::cerr);
}
