#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace normcase::service {

/// Directory-backed durable store. Keys are relative paths under the root.
/// Whole-file writes are atomic (temp file + rename); logs are append-only
/// sequences of length-prefixed records.
class FileStore {
public:
    explicit FileStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    std::optional<std::string> read(std::string_view key) const;
    void write_atomic(std::string_view key, std::string_view data);
    bool exists(std::string_view key) const;

    /// Appends one record and flushes it to disk before returning.
    void append_record(std::string_view key, std::string_view record);
    /// All complete records. A torn trailing record is ignored.
    std::vector<std::string> read_records(std::string_view key) const;
    /// Cuts a torn trailing record so later appends stay readable.
    void truncate_torn_tail(std::string_view key);

    /// Names of immediate subdirectories of `key`, sorted.
    std::vector<std::string> list_dirs(std::string_view key) const;
    /// Names of regular files in `key`, sorted.
    std::vector<std::string> list_files(std::string_view key) const;

private:
    std::filesystem::path root_;

    std::filesystem::path path_of(std::string_view key) const;
};

} // namespace normcase::service
