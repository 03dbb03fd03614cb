#include "pme/harness.hpp"

int main(int argc, char** argv)
{
    return pme::cli_main(argc, argv);
}
