#ifndef PROPFLOW_CSV_HPP
#define PROPFLOW_CSV_HPP

#include <ostream>
#include <string>
#include <vector>

namespace propflow {

// Numbers are written with 12 significant digits and no locale dependence.
std::string format_number(double v);

// Full-precision text form that parses back to the identical double.
std::string format_exact(double v);

// RFC 4180 style quoting: fields holding comma, quote or newline get quoted.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
};

}  // namespace propflow

#endif
