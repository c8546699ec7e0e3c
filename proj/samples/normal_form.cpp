// Grid expansion and the a*u*y^p*ell^l normal form of one expression.
#include <iostream>

#include "cfn/cfn.hpp"

int main(int argc, char** argv) {
    using namespace cfn;
    const std::string text = argc > 1 ? argv[1] : "1/y + log(y) + y^(1/2)/(1-y)";
    try {
        const CExpr e = parse_cexpr(text);
        const GridSeries g = prepare_constructible(e);
        std::cout << "grid:\n";
        for (const GridTerm& t : g.truncate(8)) {
            std::cout << "  " << t.c.str() << " * y^(" << t.p << ") * ell^" << t.l << "\n";
        }
        const PreparedForm f = to_prepared_form(g);
        std::cout << "form:\n";
        for (const PreparedTerm& t : f.terms) {
            std::cout << "  a = " << t.a.str() << ", p = " << t.p << ", l = " << t.l << ", u = ";
            const auto u = t.u.series().truncate(4);
            for (std::size_t i = 0; i < u.size(); ++i) {
                std::cout << (i ? " + " : "") << u[i].coefficient.str() << "*y^(" << u[i].exponent << ")";
            }
            std::cout << (t.u.is_one() ? "" : " + ...") << "\n";
        }
        std::cout << (check_prepared_form(f).ok() ? "structure ok\n" : "structure violated\n");
    } catch (const Error& err) {
        std::cerr << err.what() << "\n";
        return 1;
    }
}
