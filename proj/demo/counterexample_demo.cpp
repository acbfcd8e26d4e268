// The direct-sum counterexample: every block u_n has norm exactly 1, so the
// partial sums of squared norms grow like N and the formal sum escapes the
// direct-sum space even though each block is perfectly admissible.

#include <opspec/opspec.hpp>

#include <cstdio>

using namespace opspec;

int main() {
    CounterexampleSpec spec;
    spec.blocks = 16;

    auto norms = counterexample_norms(spec);
    std::printf(" n   alpha_n      c_n       ||u_n||^2   sum_{k<=n}\n");
    for (int n = 1; n <= spec.blocks; ++n)
        std::printf("%2d   %.5f   %8.4f   %.8f   %6.1f\n", n,
                    counterexample_alpha(spec, n), counterexample_c(spec, n),
                    norms.closed_form[n - 1], norms.partial_sums[n - 1]);

    std::vector<int> n_list;
    for (int n = 1; n <= spec.blocks; ++n) n_list.push_back(n);
    auto growth = direct_sum_membership(norms.closed_form, n_list);
    std::printf("\ngrowth exponent %.4f -> %s\n", growth.exponent,
                growth.divergent ? "diverges: the formal sum leaves the direct sum"
                                 : "converges");

    CounterexampleSpec summable = spec;
    summable.alpha_power = 2.0;
    auto g2 = direct_sum_membership(counterexample_norms(summable).closed_form, n_list);
    std::printf("summable variant (alpha_n = 1/n^2): exponent %.4f -> %s\n", g2.exponent,
                g2.divergent ? "diverges" : "converges");
    return 0;
}
