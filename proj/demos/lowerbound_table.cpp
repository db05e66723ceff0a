// Queries to reach gap <= eps on noisy-binary-search instances (alpha = 2, tau = G = R = 1).
#include <iostream>

#include "pgdlab.hpp"

int main()
{
    using namespace pgdlab::harness;
    const LowerBoundTable t = lowerbound_demo({0.04, 0.02, 0.01, 0.005}, 2.0, 1.0, 1.0, 1.0, 1);
    std::cout << lowerbound_to_json(t).dump(2) << '\n';
}
