// Proj-STORM on the lower-bound function f1: mean final gap over seeds for a few budgets.
#include <cmath>
#include <iostream>

#include "pgdlab.hpp"

int main(int argc, char** argv)
{
    using namespace pgdlab;
    const double alpha = argc > 1 ? std::stod(argv[1]) : 1.5;
    const LowerBoundPair pair = make_lower_bound_pair(alpha, 1.0, 1.0, 0.1);
    const auto f1 = std::make_shared<const Objective>(pair.f1);
    const DominanceCertificate& c = *f1->certificate();

    StormOptions opt;
    opt.alpha = alpha;
    opt.eta0 = *c.eta0;
    opt.beta0 = 1.0 / (2.0 * c.L * opt.eta0);
    std::cout << "eta0=" << opt.eta0 << " beta0=" << opt.beta0 << " L=" << c.L << " tau=" << c.tau << '\n';

    for (std::uint64_t T : {256u, 1024u, 4096u}) {
        opt.T = T;
        double sum = 0.0;
        const int seeds = 20;
        for (int s = 1; s <= seeds; ++s) {
            Oracle oracle(GaussianAdditive{f1, 1.0}, s);
            sum += *proj_storm(oracle, f1->domain(), scalar_vector(2.0 * pair.rho), opt).final().gap;
        }
        std::cout << "T=" << T << " mean gap=" << sum / seeds << " (target rate T^" << -alpha / 2.0 << ")\n";
    }
}
