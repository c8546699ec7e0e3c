// Symbolic derivative, its value at a point as a limit of difference
// quotients, and the termwise check on the grid.
#include <iostream>

#include "cfn/cfn.hpp"

int main() {
    using namespace cfn;
    const CExpr e = parse_cexpr("y*log(y)*log(1 + y^2) - (1 + y)^(-1/2)");
    const CExpr d = derivative_symbolic(e);
    std::cout << "f  = " << print_canonical(e) << "\nf' = " << print_canonical(d) << "\n";

    const Rational t0(9, 16);
    std::cout << "difference quotient at 9/16: " << difference_quotient_derivative(e, t0).str() << "\n";
    std::cout << "f'(9/16) enclosure: " << eval_interval(d, t0, 128).str(25) << "\n";
    std::cout << "finite difference:  " << finite_difference(e, t0).estimate << "\n";

    const ClosureReport r = closure_check(e, 10);
    std::cout << "termwise derivative vs expansion of f': " << to_string(r.status) << " (" << r.checked_terms
              << " terms)\n";
}
