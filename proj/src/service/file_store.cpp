#include "normcase/service/file_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace normcase::service {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_error(const std::string& what, const fs::path& p) {
    throw std::system_error(errno, std::generic_category(), what + " " + p.string());
}

void write_all(int fd, std::string_view data, const fs::path& p) {
    while (!data.empty()) {
        const ssize_t n = ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            io_error("write", p);
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

void fsync_dir(const fs::path& dir) {
    const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
    if (fd < 0) return;
    ::fsync(fd);
    ::close(fd);
}

} // namespace

FileStore::FileStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path FileStore::path_of(std::string_view key) const {
    const fs::path rel(key);
    for (const auto& part : rel)
        if (part == ".." || rel.is_absolute()) throw std::invalid_argument("bad store key: " + std::string(key));
    return root_ / rel;
}

std::optional<std::string> FileStore::read(std::string_view key) const {
    std::ifstream in(path_of(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool FileStore::exists(std::string_view key) const { return fs::exists(path_of(key)); }

void FileStore::write_atomic(std::string_view key, std::string_view data) {
    static std::atomic<unsigned> counter{0};
    const fs::path target = path_of(key);
    fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) io_error("open", tmp);
    write_all(fd, data, tmp);
    ::fsync(fd);
    ::close(fd);
    fs::rename(tmp, target);
    fsync_dir(target.parent_path());
}

// Record framing: decimal payload length, '\n', payload, '\n'.
void FileStore::append_record(std::string_view key, std::string_view record) {
    const fs::path target = path_of(key);
    fs::create_directories(target.parent_path());
    const int fd = ::open(target.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) io_error("open", target);
    std::string framed = std::to_string(record.size());
    framed.push_back('\n');
    framed.append(record);
    framed.push_back('\n');
    write_all(fd, framed, target);
    ::fsync(fd);
    ::close(fd);
}

namespace {

// Parses complete records; returns the byte length of the valid prefix.
std::size_t parse_records(const std::string& data, std::vector<std::string>* out) {
    std::size_t pos = 0;
    while (pos < data.size()) {
        const std::size_t nl = data.find('\n', pos);
        if (nl == std::string::npos) break;
        const std::string header = data.substr(pos, nl - pos);
        if (header.empty() || !std::all_of(header.begin(), header.end(), [](char c) { return c >= '0' && c <= '9'; }))
            break;
        if (header.size() > 12) break;
        const std::size_t len = std::stoull(header);
        const std::size_t start = nl + 1;
        if (start + len + 1 > data.size() || data[start + len] != '\n') break;
        if (out) out->push_back(data.substr(start, len));
        pos = start + len + 1;
    }
    return pos;
}

} // namespace

std::vector<std::string> FileStore::read_records(std::string_view key) const {
    std::vector<std::string> out;
    if (const auto data = read(key)) parse_records(*data, &out);
    return out;
}

void FileStore::truncate_torn_tail(std::string_view key) {
    const auto data = read(key);
    if (!data) return;
    const std::size_t valid = parse_records(*data, nullptr);
    if (valid != data->size()) fs::resize_file(path_of(key), valid);
}

std::vector<std::string> FileStore::list_dirs(std::string_view key) const {
    std::vector<std::string> out;
    const fs::path dir = path_of(key);
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory()) out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> FileStore::list_files(std::string_view key) const {
    std::vector<std::string> out;
    const fs::path dir = path_of(key);
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace normcase::service
