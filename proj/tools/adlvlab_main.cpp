#include "adlvlab/adlv.hpp"
int main() { return 0; }
