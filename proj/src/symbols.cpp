#include "pdm/symbols.hpp"

#include "pdm/errors.hpp"

namespace pdm {

Registry& Registry::instance() {
    static Registry reg;
    return reg;
}

Registry::Registry() {
    const std::function<void(VarId)> none;
    publish({"x1", VarKind::Coord, ""}, none);
    publish({"x2", VarKind::Coord, ""}, none);
    publish({"x3", VarKind::Coord, ""}, none);
    publish({"r", VarKind::Radical, "r^2 = x1^2 + x2^2 + x3^2"}, none);
    publish({"rt", VarKind::Radical, "rt^2 = x1^2 + x2^2"}, none);
    publish({"phi", VarKind::Angle, "phi = arctan(x2/x1)"}, none);
    publish({"theta", VarKind::Angle, "theta = arctan(rt/x3)"}, none);
    publish({"lrt", VarKind::Log, "lrt = ln(rt)"}, none);
}

VarId Registry::publish(VarInfo info, const std::function<void(VarId)>& before_publish) {
    const int id = count_.load(std::memory_order_relaxed);
    if (id >= kMaxVars) throw Error("symbol registry full (" + std::to_string(kMaxVars) + " symbols)");
    slots_[static_cast<std::size_t>(id)] = std::move(info);
    if (before_publish) before_publish(id);
    count_.store(id + 1, std::memory_order_release);
    return id;
}

std::optional<VarId> Registry::find(const std::string& name) const {
    const int n = size();
    for (int i = 0; i < n; ++i) {
        if (slots_[static_cast<std::size_t>(i)].name == name) return i;
    }
    return std::nullopt;
}

// Parameters and catalog generators live in separate namespaces: a generator
// is only reachable through the parse context of the entry that defines it,
// so a parameter of the same name elsewhere is a different symbol.
std::optional<VarId> Registry::find_kind(const std::string& name, bool param) const {
    const int n = size();
    for (int i = 0; i < n; ++i) {
        const VarInfo& v = slots_[static_cast<std::size_t>(i)];
        if (v.name == name && (v.kind == VarKind::Param) == param) return i;
    }
    return std::nullopt;
}

namespace {
bool builtin_kind(VarKind k) { return k != VarKind::Param && k != VarKind::Exp; }
}  // namespace

VarId Registry::param(const std::string& name) {
    if (auto id = find(name); id && builtin_kind(kind(*id)))
        throw UnknownSymbol("'" + name + "' is not a parameter");
    if (auto id = find_kind(name, true)) return *id;
    std::lock_guard lock(mutex_);
    if (auto id = find_kind(name, true)) return *id;
    return publish({name, VarKind::Param, ""}, {});
}

VarId Registry::add_generator(const std::string& name, VarKind kind, const std::string& relation,
                              const std::function<void(VarId)>& before_publish) {
    std::lock_guard lock(mutex_);
    if (auto id = find(name); id && builtin_kind(this->kind(*id)))
        throw UnknownSymbol("generator name '" + name + "' clashes with a built-in symbol");
    if (auto id = find_kind(name, false)) {
        if (this->kind(*id) == kind && info(*id).relation == relation) return *id;
        throw UnknownSymbol("generator name '" + name + "' already registered with a different meaning");
    }
    return publish({name, kind, relation}, before_publish);
}

}  // namespace pdm
