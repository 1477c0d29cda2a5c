#pragma once

// Process-wide registry of the indeterminates an Expr may contain:
// Cartesian coordinates, the radicals r and rt, the relation-free
// transcendental generators, user-registered generators and parameters.
// Entries are append-only; a slot is fully written before it is published,
// so lookups by id never need a lock.

#include <array>
#include <atomic>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace pdm {

using VarId = int;

enum class VarKind {
    Coord,    // x1, x2, x3
    Radical,  // r (r^2 = x1^2+x2^2+x3^2), rt (rt^2 = x1^2+x2^2)
    Angle,    // phi, theta: relation-free
    Log,      // lrt = ln(rt): relation-free
    Exp,      // user generator w = exp(sum c_k * L_k): relation-free
    Param,    // free commuting parameter symbol
};

inline constexpr int kMaxVars = 48;

namespace var {
inline constexpr VarId x1 = 0;
inline constexpr VarId x2 = 1;
inline constexpr VarId x3 = 2;
inline constexpr VarId r = 3;
inline constexpr VarId rt = 4;
inline constexpr VarId phi = 5;
inline constexpr VarId theta = 6;
inline constexpr VarId lrt = 7;
inline constexpr int kBuiltins = 8;
}  // namespace var

struct VarInfo {
    std::string name;
    VarKind kind = VarKind::Param;
    std::string relation;  // human-readable defining relation / metadata
};

class Registry {
public:
    static Registry& instance();

    /// Id of a parameter, registering it on first use. Throws UnknownSymbol
    /// if the name is taken by a non-parameter.
    VarId param(const std::string& name);

    /// Registers a new generator. `before_publish` runs under the registry
    /// lock with the new id, before the entry becomes visible, so dependent
    /// tables can be filled first. Returns the existing id if an identical
    /// name of the same kind exists and `allow_existing` is set.
    VarId add_generator(const std::string& name, VarKind kind, const std::string& relation,
                        const std::function<void(VarId)>& before_publish);

    std::optional<VarId> find(const std::string& name) const;
    std::optional<VarId> find_kind(const std::string& name, bool param) const;
    const VarInfo& info(VarId id) const { return slots_[static_cast<std::size_t>(id)]; }
    const std::string& name(VarId id) const { return info(id).name; }
    VarKind kind(VarId id) const { return info(id).kind; }
    int size() const { return count_.load(std::memory_order_acquire); }

    static bool is_coord(VarId v) { return v >= var::x1 && v <= var::x3; }

private:
    Registry();
    VarId publish(VarInfo info, const std::function<void(VarId)>& before_publish);

    std::array<VarInfo, kMaxVars> slots_;
    std::atomic<int> count_{0};
    mutable std::mutex mutex_;
};

}  // namespace pdm
