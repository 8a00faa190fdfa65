#pragma once

#include "normcase/reasoner/engine.hpp"
#include "normcase/lang/diagnostic.hpp"

#include "../support/fixtures.hpp"

#include <stdexcept>

namespace normcase::testing {

inline std::shared_ptr<const reasoner::Model> compile_or_throw(std::string_view source) {
    auto r = reasoner::Model::compile(source);
    if (!r.model) {
        std::string msg = "model does not compile:";
        for (const auto& d : r.diagnostics) msg += "\n" + lang::format(d);
        throw std::runtime_error(msg);
    }
    return r.model;
}

inline std::shared_ptr<const reasoner::Model> quittance_model() {
    static const auto model = compile_or_throw(fixture("quittance.norm"));
    return model;
}

inline reasoner::Instance inst(std::string type) { return {std::move(type), std::nullopt}; }
inline reasoner::Instance inst(std::string type, std::int64_t v) { return {std::move(type), reasoner::Literal{v}}; }
inline reasoner::Instance inst(std::string type, std::string v) {
    return {std::move(type), reasoner::Literal{std::move(v)}};
}

inline reasoner::ActInvocation invoke(std::string act, std::string actor, std::optional<std::string> recipient) {
    reasoner::ActInvocation inv{std::move(act), reasoner::Literal{std::move(actor)}, std::nullopt};
    if (recipient) inv.recipient = reasoner::Literal{std::move(*recipient)};
    return inv;
}

} // namespace normcase::testing
