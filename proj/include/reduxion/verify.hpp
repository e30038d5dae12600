#pragma once

#include <string>
#include <vector>

namespace reduxion {

// One closed-form check: a quantity computed by the engine against its analytic value.
struct VerifyRow {
    std::string group;
    std::string name;
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;
    bool relative = false; // tolerance applies to |actual - expected| / |expected|
    bool pass = false;
};

// Closed-form table for the worked examples. `filter` keeps groups whose name contains it.
std::vector<VerifyRow> verify_table(const std::string& filter = "");

VerifyRow make_row(std::string group, std::string name, double expected, double actual, double tolerance,
                   bool relative = false);

} // namespace reduxion
