// Shared vocabulary types: configurations, leaf identifiers, validity tags
// and the exception hierarchy used across the library.

#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace frm {

/// A point in the ambient configuration space.
using Configuration = Eigen::VectorXd;

/// Selects one leaf M_{i,theta}: foliation index plus co-parameter index.
struct LeafId {
    int foliation = 0;
    int co_parameter = 0;

    friend auto operator<=>(const LeafId&, const LeafId&) = default;
};

enum class ValidityTag : std::uint8_t {
    Valid,
    RobotInvalid,
    ObjectInvalid,
    ConstraintInvalid,
};

inline constexpr int kValidityTagCount = 4;

std::string_view to_string(ValidityTag tag);
ValidityTag validity_tag_from_string(std::string_view name);

std::string to_string(const LeafId& leaf);

/// A caller broke a documented precondition (dimension mismatch, unknown id...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed input file. `what()` carries location diagnostics.
class LoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user-supplied parameter.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Start or goal query does not lie on its declared leaf.
class QueryRejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace frm
