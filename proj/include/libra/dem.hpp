#pragma once

#include <iosfwd>
#include <string>

#include "libra/model.hpp"

namespace libra {

class ParseError : public Error {
  public:
    ParseError(const std::string& msg, size_t line, size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line(line),
          column(column) {}

    size_t line;
    size_t column;
};

// Parse the textual error-model format (a strict subset of the detector
// error model text format, plus the `#logical` directive).
ErrorModel parse_model(const std::string& text);
ErrorModel parse_model_file(const std::string& path);

std::string serialize_model(const ErrorModel& model);
void write_model_file(const ErrorModel& model, const std::string& path);

}  // namespace libra
