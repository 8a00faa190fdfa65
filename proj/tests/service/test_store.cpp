#include <doctest.h>

#include "normcase/service/directory.hpp"
#include "normcase/service/model_registry.hpp"
#include "normcase/service/sha256.hpp"

#include "../support/service_harness.hpp"

#include <fstream>

using namespace normcase::service;
using normcase::testing::ManualClock;
using normcase::testing::TempDir;

TEST_CASE("sha256 matches the standard test vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("atomic writes and reads") {
    TempDir dir;
    FileStore store(dir.path());
    CHECK_FALSE(store.read("a/b.txt"));
    store.write_atomic("a/b.txt", "one");
    store.write_atomic("a/b.txt", "two");
    CHECK(*store.read("a/b.txt") == "two");
    CHECK(store.list_files("a") == std::vector<std::string>{"b.txt"});
    CHECK_THROWS(store.read("../escape"));
}

TEST_CASE("length-prefixed records survive a torn tail") {
    TempDir dir;
    FileStore store(dir.path());
    store.append_record("log", "first");
    store.append_record("log", "with\nnewline");
    CHECK(store.read_records("log") == std::vector<std::string>{"first", "with\nnewline"});
    {
        std::ofstream out(dir.path() / "log", std::ios::app | std::ios::binary);
        out << "40\n{\"partial";
    }
    CHECK(store.read_records("log").size() == 2);
    store.truncate_torn_tail("log");
    store.append_record("log", "third");
    CHECK(store.read_records("log") == std::vector<std::string>{"first", "with\nnewline", "third"});
}

TEST_CASE("model registry is content addressed") {
    TempDir dir;
    FileStore store(dir.path());
    ModelRegistry reg(store, ManualClock{});
    const std::string src = normcase::testing::quittance_source();
    const auto first = reg.register_model(src);
    CHECK(first.created);
    CHECK(first.version.version_id == sha256_hex(src));
    const auto again = reg.register_model(src);
    CHECK_FALSE(again.created);
    CHECK(again.version.version_id == first.version.version_id);
    CHECK(reg.list().size() == 1);
    CHECK(*reg.source(first.version.version_id) == src);
}

TEST_CASE("invalid models are rejected with diagnostics and not stored") {
    TempDir dir;
    FileStore store(dir.path());
    ModelRegistry reg(store, ManualClock{});
    try {
        reg.register_model("Fact f Holds when");
        FAIL("expected rejection");
    } catch (const ServiceError& e) {
        CHECK(e.code() == ServiceError::Code::InvalidModel);
        CHECK_FALSE(e.diagnostics().empty());
    }
    CHECK(reg.list().empty());
}

TEST_CASE("active model pointer") {
    TempDir dir;
    FileStore store(dir.path());
    ModelRegistry reg(store, ManualClock{});
    CHECK_FALSE(reg.active());
    CHECK_THROWS_AS(reg.set_active(std::string(64, 'a')), ServiceError);
    const auto id = reg.register_model("Bool b.").version.version_id;
    reg.set_active(id);
    CHECK(*reg.active() == id);
    ModelRegistry reopened(store, ManualClock{});
    CHECK(*reopened.active() == id);
    CHECK(reopened.model(id)->find("b"));
}

TEST_CASE("directory permissions and persistence") {
    TempDir dir;
    FileStore store(dir.path());
    {
        Directory d(store, std::string("root-token"));
        const User admin = *d.authenticate("root-token");
        CHECK(d.is_admin(admin));
        CHECK(d.may_perform(admin, "anything", "else"));
        CHECK_THROWS_AS(d.create_user("u", "U", {"clerk"}), ServiceError); // unknown role
        d.set_permissions("clerk", {{"grant"}, true});
        d.set_permissions("all", {{"*"}, false});
        const User u = d.create_user("u", "U", {"clerk"}, std::string("tok-u"));
        CHECK(d.may_perform(u, "press-grant", "grant"));
        CHECK_FALSE(d.may_perform(u, "press-deny", "deny"));
        CHECK(d.may_enter_data(u));
        d.set_four_eyes({"grant"});
        CHECK(d.requires_four_eyes("press-grant", "grant"));
        CHECK_THROWS_AS(d.create_user("u", "again", {}), ServiceError);
    }
    Directory reopened(store, std::nullopt);
    const auto u = reopened.authenticate("tok-u");
    REQUIRE(u);
    CHECK(u->roles == std::set<std::string>{"clerk"});
    CHECK_FALSE(reopened.authenticate("root-token"));
    CHECK(reopened.requires_four_eyes("x", "grant"));
    reopened.update_roles("u", {}, {"clerk"});
    CHECK_FALSE(reopened.may_perform(*u, "press-grant", "grant")); // stale handle, fresh roles
}
