#include <catch2/catch_amalgamated.hpp>
int main_placeholder_test_caps_nullframe(){return 0;}
