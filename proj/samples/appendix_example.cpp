// Counts, truncated series and the closed-form Poincare series of x^2 - y^3.

#include <iostream>

#include "ptrunk/ptrunk.hpp"

int main() {
    using namespace ptrunk;
    const Polynomial P = parse_polynomial("x^2 - y^3");
    const Prime p(5);

    BuildOptions opt;
    opt.certify_stalks = true;
    const Trunk T = build_trunk(P, p, 2, opt);

    std::cout << "N_e for " << to_string(P) << " mod 5^e:\n";
    const CountReport r = count_report(T, 10);
    for (std::size_t e = 0; e < r.counts.size(); ++e) std::cout << "  e=" << e << "  " << r.counts[e] << "\n";

    const auto S = exact_series(T);
    if (!S) return 1;
    std::cout << "S(T) = " << *S << "\n";

    // cross-check against brute force on the small levels
    for (std::uint64_t e = 1; e <= 3; ++e) {
        if (brute_force_count(P, p, e) != r.counts[e]) {
            std::cerr << "mismatch at e=" << e << "\n";
            return 1;
        }
    }
    return 0;
}
