#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pite::verify {

struct IdentityResult {
    std::string name;
    double gap = 0.0;        // worst measured deviation
    double tolerance = 0.0;  // allowed deviation
    bool pass = false;
    std::string detail;
};

struct Options {
    std::uint64_t seed = 987654321;
    // test hook: flips the sign of the bias cross term in the Proposition 1
    // reference formula, so exactly that identity must fail
    bool inject_prop1_sign_bug = false;
};

// The metric-identity suite behind `pitebench verify`:
//   r2-reconstruction   decomposition equals the direct R^2 (1000 x m=100)
//   mae-bounds          triangle envelope holds on the same instances
//   calibration         calibration(est, est) == (0, 1) to 1e-12
//   prop1-decomposition Monte Carlo MSE_PITE matches MSE_t + MSE_c - 2 b_t b_c
//                       within 3 standard errors at 1e4 replications for
//                       (b_t, b_c) in {(0,0), (1,-1), (0.5,0.5)}
std::vector<IdentityResult> run_identity_suite(const Options& options = {});

bool all_pass(const std::vector<IdentityResult>& results);

}  // namespace pite::verify
