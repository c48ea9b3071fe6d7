#include "frm/core.hpp"

namespace frm {

std::string_view to_string(ValidityTag tag) {
    switch (tag) {
        case ValidityTag::Valid: return "valid";
        case ValidityTag::RobotInvalid: return "robot_invalid";
        case ValidityTag::ObjectInvalid: return "object_invalid";
        case ValidityTag::ConstraintInvalid: return "constraint_invalid";
    }
    return "unknown";
}

ValidityTag validity_tag_from_string(std::string_view name) {
    for (int t = 0; t < kValidityTagCount; ++t) {
        const auto tag = static_cast<ValidityTag>(t);
        if (to_string(tag) == name) return tag;
    }
    throw LoadError("unknown validity tag '" + std::string(name) + "'");
}

std::string to_string(const LeafId& leaf) {
    return "(" + std::to_string(leaf.foliation) + "," + std::to_string(leaf.co_parameter) + ")";
}

}  // namespace frm
