#include "normcase/reasoner/model.hpp"

#include "normcase/lang/validate.hpp"

namespace normcase::reasoner {

Model::Model(lang::Specification spec) : spec_(std::move(spec)) {
    for (const auto& d : spec_.declarations) {
        index_.emplace(d.name, &d);
        if (d.kind == lang::DeclKind::PhysicalAct) physical_.push_back(&d);
    }
    for (const auto* p : physical_)
        if (p->syncs_with) counterparts_[*p->syncs_with].push_back(p);
}

Model::CompileResult Model::compile(std::string_view source) {
    lang::LoadResult loaded = lang::load(source);
    CompileResult out;
    out.diagnostics = std::move(loaded.diagnostics);
    if (loaded.spec) out.model = std::make_shared<const Model>(std::move(*loaded.spec));
    return out;
}

const lang::Declaration* Model::find(std::string_view name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : it->second;
}

const lang::Declaration& Model::institutional_of(const lang::Declaration& physical) const {
    return *find(*physical.syncs_with);
}

const lang::Declaration* Model::resolve_executable(std::string_view name) const {
    const lang::Declaration* d = find(name);
    if (!d) return nullptr;
    if (d->kind == lang::DeclKind::PhysicalAct) return d;
    if (d->kind == lang::DeclKind::Act) {
        auto it = counterparts_.find(name);
        if (it != counterparts_.end() && it->second.size() == 1) return it->second.front();
    }
    return nullptr;
}

bool Model::takes_recipient(const lang::Declaration& physical) const {
    return physical.recipient.has_value() || institutional_of(physical).recipient.has_value();
}

} // namespace normcase::reasoner
