#include "topicaudit/cli.hpp"

int main(int argc, char** argv) { return topicaudit::cli_dispatch(argc, argv); }
