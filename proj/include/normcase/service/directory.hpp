#pragma once

#include "normcase/service/errors.hpp"
#include "normcase/service/file_store.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

namespace normcase::service {

inline constexpr std::string_view kAdminRole = "admin";

struct User {
    std::string id;
    std::string display_name;
    std::set<std::string> roles;
    std::string token;
};

struct RolePermissions {
    std::set<std::string> acts; // physical or institutional act names; "*" = all
    bool data_entry = false;
};

/// Users, role table, and four-eyes designations. Persisted on every change.
/// The admin role is built in and permits everything.
class Directory {
public:
    /// `admin_token`, when set, authenticates the built-in "admin" user.
    Directory(FileStore& store, std::optional<std::string> admin_token);

    User create_user(const std::string& id, const std::string& display_name, const std::set<std::string>& roles,
                     std::optional<std::string> token = std::nullopt);
    User update_roles(const std::string& id, const std::set<std::string>& add, const std::set<std::string>& remove);
    void set_permissions(const std::string& role, RolePermissions permissions);
    void set_four_eyes(std::set<std::string> acts);

    std::optional<User> authenticate(std::string_view token) const;
    std::optional<User> find_user(const std::string& id) const;
    std::optional<RolePermissions> role(const std::string& name) const;
    std::set<std::string> four_eyes() const;

    bool is_admin(const User& user) const;
    bool may_perform(const User& user, const std::string& physical, const std::string& institutional) const;
    bool may_enter_data(const User& user) const;
    bool requires_four_eyes(const std::string& physical, const std::string& institutional) const;

private:
    FileStore& store_;
    std::optional<std::string> admin_token_;
    mutable std::mutex mutex_;
    std::map<std::string, User> users_;
    std::map<std::string, RolePermissions> roles_;
    std::set<std::string> four_eyes_;

    void save() const;
    bool permits(const User& user, const std::function<bool(const RolePermissions&)>& test) const;
};

} // namespace normcase::service
