#include <surflow/cli.hpp>

int main(int argc, char** argv)
{
    return surflow::run_cli(argc, argv);
}
