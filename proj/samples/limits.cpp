// Exact one-sided limits at 0+, compared with a numeric probe.
#include <iostream>

#include "cfn/cfn.hpp"

int main(int argc, char** argv) {
    using namespace cfn;
    std::vector<std::string> inputs{"y*log(y)", "(1/y)*log(1+y)", "1/y - 1/(y*(1+y))", "log(2+y)*y + log(y)*log(1+y)/y",
                                    "y^(1/2)*log(y)^2 + 3"};
    if (argc > 1) {
        inputs.assign(argv + 1, argv + argc);
    }
    for (const auto& text : inputs) {
        try {
            const CExpr e = parse_cexpr(text);
            const LimitResult lim = limit_of_expr(e);
            const ProbeReport probe = probe_limit(e, default_probe_schedule());
            std::cout << text << "\n  exact: " << lim.str() << "\n  probe: " << to_string(probe.trend);
            if (probe.limit) {
                std::cout << " " << probe.limit->str(12);
            }
            std::cout << "\n";
        } catch (const Error& err) {
            std::cout << text << "\n  " << err.what() << "\n";
        }
    }
}
