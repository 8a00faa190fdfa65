#include "normcase/service/directory.hpp"

#include <json.hpp>

#include <random>

namespace normcase::service {

using nlohmann::json;

namespace {

constexpr const char* kKey = "auth/directory.json";

std::string random_token() {
    std::random_device rd;
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < 40; ++i) out.push_back(hex[rd() % 16]);
    return out;
}

User builtin_admin(const std::string& token) { return {"admin", "Administrator", {std::string(kAdminRole)}, token}; }

} // namespace

Directory::Directory(FileStore& store, std::optional<std::string> admin_token)
    : store_(store), admin_token_(std::move(admin_token)) {
    const auto data = store_.read(kKey);
    if (!data) return;
    const json doc = json::parse(*data);
    for (const auto& u : doc.at("users"))
        users_[u.at("id")] = {u.at("id"), u.at("displayName"), u.at("roles").get<std::set<std::string>>(),
                              u.at("token")};
    for (const auto& [name, r] : doc.at("roles").items())
        roles_[name] = {r.at("acts").get<std::set<std::string>>(), r.at("dataEntry").get<bool>()};
    four_eyes_ = doc.at("fourEyes").get<std::set<std::string>>();
}

void Directory::save() const {
    json users = json::array(), roles = json::object();
    for (const auto& [id, u] : users_)
        users.push_back({{"id", u.id}, {"displayName", u.display_name}, {"roles", u.roles}, {"token", u.token}});
    for (const auto& [name, r] : roles_) roles[name] = {{"acts", r.acts}, {"dataEntry", r.data_entry}};
    store_.write_atomic(kKey, json{{"users", users}, {"roles", roles}, {"fourEyes", four_eyes_}}.dump(2));
}

User Directory::create_user(const std::string& id, const std::string& display_name,
                            const std::set<std::string>& roles, std::optional<std::string> token) {
    if (id.empty()) throw ServiceError(ServiceError::Code::BadRequest, "userId must not be empty");
    std::lock_guard lock(mutex_);
    if (users_.count(id) || id == "admin") throw ServiceError(ServiceError::Code::Conflict, "user '" + id + "' exists");
    for (const auto& r : roles)
        if (r != kAdminRole && !roles_.count(r))
            throw ServiceError(ServiceError::Code::BadRequest, "unknown role '" + r + "'");
    if (token) {
        if (token->empty() || (admin_token_ && *token == *admin_token_))
            throw ServiceError(ServiceError::Code::BadRequest, "unusable token");
        for (const auto& [_, u] : users_)
            if (u.token == *token) throw ServiceError(ServiceError::Code::Conflict, "token already in use");
    }
    User user{id, display_name.empty() ? id : display_name, roles, token ? *token : random_token()};
    users_[id] = user;
    save();
    return user;
}

User Directory::update_roles(const std::string& id, const std::set<std::string>& add,
                             const std::set<std::string>& remove) {
    std::lock_guard lock(mutex_);
    auto it = users_.find(id);
    if (it == users_.end()) throw ServiceError(ServiceError::Code::NotFound, "unknown user '" + id + "'");
    for (const auto& r : add)
        if (r != kAdminRole && !roles_.count(r))
            throw ServiceError(ServiceError::Code::BadRequest, "unknown role '" + r + "'");
    for (const auto& r : remove) it->second.roles.erase(r);
    it->second.roles.insert(add.begin(), add.end());
    save();
    return it->second;
}

void Directory::set_permissions(const std::string& role, RolePermissions permissions) {
    if (role.empty() || role == kAdminRole)
        throw ServiceError(ServiceError::Code::BadRequest, "role '" + role + "' cannot be redefined");
    std::lock_guard lock(mutex_);
    roles_[role] = std::move(permissions);
    save();
}

void Directory::set_four_eyes(std::set<std::string> acts) {
    std::lock_guard lock(mutex_);
    four_eyes_ = std::move(acts);
    save();
}

std::optional<User> Directory::authenticate(std::string_view token) const {
    if (token.empty()) return std::nullopt;
    if (admin_token_ && token == *admin_token_) return builtin_admin(*admin_token_);
    std::lock_guard lock(mutex_);
    for (const auto& [_, u] : users_)
        if (u.token == token) return u;
    return std::nullopt;
}

std::optional<User> Directory::find_user(const std::string& id) const {
    std::lock_guard lock(mutex_);
    if (auto it = users_.find(id); it != users_.end()) return it->second;
    return std::nullopt;
}

std::optional<RolePermissions> Directory::role(const std::string& name) const {
    std::lock_guard lock(mutex_);
    if (auto it = roles_.find(name); it != roles_.end()) return it->second;
    return std::nullopt;
}

std::set<std::string> Directory::four_eyes() const {
    std::lock_guard lock(mutex_);
    return four_eyes_;
}

bool Directory::is_admin(const User& user) const {
    if (!user.roles.count(std::string(kAdminRole))) return false;
    if (user.id == "admin") return true;
    // Stored users lose admin immediately when the role is revoked.
    const auto current = find_user(user.id);
    return current && current->roles.count(std::string(kAdminRole));
}

// Roles are re-read from the directory so revocations apply immediately.
bool Directory::permits(const User& user, const std::function<bool(const RolePermissions&)>& test) const {
    if (is_admin(user)) return true;
    std::lock_guard lock(mutex_);
    auto it = users_.find(user.id);
    if (it == users_.end()) return false;
    for (const auto& r : it->second.roles)
        if (auto role = roles_.find(r); role != roles_.end() && test(role->second)) return true;
    return false;
}

bool Directory::may_perform(const User& user, const std::string& physical, const std::string& institutional) const {
    return permits(user, [&](const RolePermissions& p) {
        return p.acts.count("*") || p.acts.count(physical) || p.acts.count(institutional);
    });
}

bool Directory::may_enter_data(const User& user) const {
    return permits(user, [](const RolePermissions& p) { return p.data_entry; });
}

bool Directory::requires_four_eyes(const std::string& physical, const std::string& institutional) const {
    std::lock_guard lock(mutex_);
    return four_eyes_.count(physical) || four_eyes_.count(institutional);
}

} // namespace normcase::service
