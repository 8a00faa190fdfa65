#pragma once

#include "normcase/lang/ast.hpp"

#include <string>

namespace normcase::lang {

std::string to_source(const Literal& lit);
std::string to_source(const AssignValue& value);
std::string to_source(const TemplateArg& arg);
std::string to_source(const InstanceTemplate& tmpl);
/// Binary subexpressions are fully parenthesised, so the output reparses
/// to the same tree.
std::string to_source(const Expr& expr);
std::string to_source(const Declaration& decl);
std::string to_source(const Statement& stmt);
std::string to_source(const Specification& spec);

} // namespace normcase::lang
