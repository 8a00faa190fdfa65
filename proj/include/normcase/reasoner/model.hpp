#pragma once

#include "normcase/lang/ast.hpp"
#include "normcase/lang/diagnostic.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace normcase::reasoner {

/// A validated, flattened specification with name lookup and the
/// physical/institutional act pairing precomputed. Immutable once built.
class Model {
public:
    /// `spec` must already be validated and flattened.
    explicit Model(lang::Specification spec);
    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;

    struct CompileResult {
        std::shared_ptr<const Model> model;
        lang::Diagnostics diagnostics;
    };
    /// parse + validate + flatten + index.
    static CompileResult compile(std::string_view source);

    const lang::Specification& spec() const { return spec_; }
    const lang::Declaration* find(std::string_view name) const;

    /// Physical acts in declaration order: the executable surface.
    const std::vector<const lang::Declaration*>& physical_acts() const { return physical_; }
    const lang::Declaration& institutional_of(const lang::Declaration& physical) const;

    /// Resolves a physical act name, or an institutional act name that has
    /// exactly one physical counterpart, to the physical declaration.
    const lang::Declaration* resolve_executable(std::string_view name) const;

    /// True when either side of the physical/institutional pair declares a Recipient.
    bool takes_recipient(const lang::Declaration& physical) const;

private:
    lang::Specification spec_;
    std::map<std::string, const lang::Declaration*, std::less<>> index_;
    std::vector<const lang::Declaration*> physical_;
    std::map<std::string, std::vector<const lang::Declaration*>, std::less<>> counterparts_;
};

} // namespace normcase::reasoner
