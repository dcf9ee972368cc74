#pragma once

#include "adtmas/adt.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adtmas {

struct SourceSpan {
    std::string file;
    int line = 1;    // 1-based
    int column = 1;  // 1-based
    int length = 0;
};

struct ParseError {
    SourceSpan span;
    std::string message;
    std::vector<std::string> expected;
    bool semantic = false;  // from validate, not the grammar

    std::string str() const;  // file:line:col: message
};

struct ParseResult {
    std::optional<AdtModel> model;
    std::vector<ParseError> errors;

    bool ok() const { return model.has_value() && errors.empty(); }
    bool has_syntax_errors() const;
};

ParseResult parse(std::string_view text, const std::string& file = "<input>");

std::string serialize(const AdtModel& model);

}  // namespace adtmas
