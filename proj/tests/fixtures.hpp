// Shared fixtures for the quartic two-category benchmark.
#ifndef CATSR_TESTS_FIXTURES_HPP
#define CATSR_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

namespace catsr::fixtures {

/// One row per combination cell, v1 = 1 everywhere; targets evaluated from
/// the reference parameter values of the quartic benchmark.
inline const char* quartic_csv() {
    return "u,l,v1,y\n"
           "A,a,1,111.01\n"
           "A,b,1,112.02\n"
           "A,c,1,113.03\n"
           "B,a,1,121.04\n"
           "B,b,1,122.05\n"
           "B,c,1,123.06\n"
           "C,a,1,131.07\n"
           "C,b,1,132.08\n"
           "C,c,1,133.09\n"
           "D,a,1,141.1\n"
           "D,b,1,142.11\n"
           "D,c,1,143.12\n";
}

inline const std::vector<double>& quartic_csv_targets() {
    static const std::vector<double> y = {111.01, 112.02, 113.03, 121.04, 122.05, 123.06,
                                          131.07, 132.08, 133.09, 141.1,  142.11, 143.12};
    return y;
}

struct RequirementCase {
    std::string id;
    std::vector<int> counts;  // cells Aa..Dc
    bool feasible;
};

/// Golden cell-count distributions with known minimum-data verdicts for the
/// quartic benchmark expression.
inline const std::vector<RequirementCase>& requirement_cases() {
    static const std::vector<RequirementCase> cases = {
        {"1:96", {8, 8, 8, 8, 8, 8, 8, 8, 8, 8, 8, 8}, true},
        {"1:90", {8, 7, 8, 8, 8, 8, 5, 8, 8, 8, 6, 8}, true},
        {"1:60", {7, 3, 5, 7, 6, 4, 3, 6, 6, 5, 3, 5}, true},
        {"1:30", {2, 2, 1, 3, 4, 1, 1, 5, 5, 4, 1, 1}, true},
        {"1:22", {2, 1, 1, 2, 3, 1, 1, 2, 5, 2, 1, 1}, true},
        {"1:21", {2, 1, 1, 2, 3, 1, 1, 2, 5, 1, 1, 1}, false},
        {"2:20", {1, 1, 2, 1, 4, 1, 2, 1, 1, 2, 2, 2}, true},
        {"2:19", {1, 1, 2, 1, 4, 1, 2, 1, 1, 1, 2, 2}, false},
        {"3:26", {3, 1, 1, 1, 4, 1, 1, 4, 5, 1, 3, 1}, true},
        {"3:25", {2, 1, 1, 1, 4, 1, 1, 4, 5, 1, 3, 1}, false},
        {"4:48", {5, 6, 3, 5, 6, 7, 4, 5, 3, 1, 1, 2}, true},
        {"4:47", {5, 6, 3, 5, 6, 7, 4, 5, 3, 1, 1, 1}, false},
    };
    return cases;
}

}  // namespace catsr::fixtures

#endif
