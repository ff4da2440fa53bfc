#include "wmh2/harness.hpp"
int main(){return 0;}
