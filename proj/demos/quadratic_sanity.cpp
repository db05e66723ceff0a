// Deterministic path: projected gradient steps with an exact oracle on a boxed quadratic.
#include <iostream>

#include "pgdlab.hpp"

int main()
{
    using namespace pgdlab;
    Vector xs(2);
    xs << 0.5, -0.25;
    const auto f = std::make_shared<const Objective>(make_power_instance(2.0, 1.0, xs, Domain::box(-Vector::Ones(2), Vector::Ones(2))));
    Oracle oracle(ExactGradient{f}, 1);

    SgdOptions opt;
    opt.T = 40;
    opt.eta0 = 1.0 / (2.0 * f->certificate()->L);
    Vector x0(2);
    x0 << -1.0, 1.0;
    const Trajectory tr = proj_sgd(oracle, f->domain(), x0, opt);
    for (const auto& r : tr.records) {
        if (r.t % 5 == 0) std::cout << "t=" << r.t << " gap=" << *r.gap << " queries=" << r.queries_cumulative << '\n';
    }
}
