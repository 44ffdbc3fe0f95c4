/*
 * Copyright 2026 The Sensation Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "sensation/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <mutex>

#include "json_util.hpp"
#include "sensation/io.hpp"

namespace sensation {

using detail::check_fields;
using detail::get_integer;
using detail::indexed;
using detail::member;
using detail::require_array;
using detail::schema_error;
using nlohmann::json;

std::string_view to_string(WriteStage stage) {
    switch (stage) {
        case WriteStage::TempOpened: return "temp-opened";
        case WriteStage::TempWritten: return "temp-written";
        case WriteStage::TempSynced: return "temp-synced";
        case WriteStage::Renamed: return "renamed";
    }
    return "?";
}

json store_to_json(const StoreSnapshot& snapshot) {
    json rules = json::array();
    for (const auto& r : snapshot.rules) rules.push_back(rule_to_json(r));
    return json{{"revision", snapshot.revision}, {"next_id", snapshot.next_id}, {"rules", rules}};
}

StoreSnapshot store_from_json(const json& j) {
    check_fields(j, "$", {"revision", "next_id", "rules"});
    StoreSnapshot s;
    const auto revision = get_integer(j, "$", "revision");
    const auto next_id = get_integer(j, "$", "next_id");
    if (revision < 0 || next_id < 1) schema_error("$", "revision must be >= 0 and next_id >= 1");
    s.revision = static_cast<std::uint64_t>(revision);
    s.next_id = static_cast<std::uint64_t>(next_id);
    const json& rules = require_array(member(j, "$", "rules"), "$.rules");
    for (std::size_t i = 0; i < rules.size(); ++i) {
        try {
            s.rules.push_back(rule_from_json(rules[i]));
        } catch (const SyntaxError& e) {
            schema_error(indexed("$.rules", i), e.what());
        }
    }
    std::sort(s.rules.begin(), s.rules.end(), [](const Rule& a, const Rule& b) { return rule_id_less(a.id, b.id); });
    for (std::size_t i = 1; i < s.rules.size(); ++i) {
        if (s.rules[i].id == s.rules[i - 1].id) schema_error("$.rules", "duplicate rule id '" + s.rules[i].id + "'");
    }
    return s;
}

namespace {

std::string errno_message(const std::string& what, const std::filesystem::path& path) {
    return what + " '" + path.string() + "': " + std::strerror(errno);
}

class Fd {
public:
    explicit Fd(int fd) : fd_(fd) {}
    ~Fd() {
        if (fd_ >= 0) ::close(fd_);
    }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    int get() const noexcept { return fd_; }
    int release() noexcept { return std::exchange(fd_, -1); }

private:
    int fd_;
};

void write_all(int fd, std::string_view data, const std::filesystem::path& path) {
    while (!data.empty()) {
        const ssize_t n = ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            throw StorageError(errno_message("cannot write", path));
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

void sync_directory(const std::filesystem::path& dir) {
    Fd fd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY));
    if (fd.get() >= 0) ::fsync(fd.get());
}

std::uint64_t id_number(const std::string& id) {
    if (id.size() < 2 || id[0] != 'r') return 0;
    std::uint64_t n = 0;
    for (std::size_t i = 1; i < id.size(); ++i) {
        if (id[i] < '0' || id[i] > '9') return 0;
        n = n * 10 + static_cast<std::uint64_t>(id[i] - '0');
    }
    return n;
}

}  // namespace

RuleStore::RuleStore(std::filesystem::path data_dir, const CapabilityRegistry& registry)
    : dir_(std::move(data_dir)), path_(dir_ / "rules.json"), registry_(registry) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw StorageError("cannot create data directory '" + dir_.string() + "': " + ec.message());
    std::filesystem::remove(path_.string() + ".tmp", ec);

    if (!std::filesystem::exists(path_)) {
        persist(state_);
        return;
    }
    state_ = store_from_json(parse_document(read_text_file(path_.string())));
    require_valid(state_.rules, registry_);
    for (const auto& r : state_.rules) state_.next_id = std::max(state_.next_id, id_number(r.id) + 1);
}

StoreSnapshot RuleStore::snapshot() const {
    std::shared_lock lock(mutex_);
    return state_;
}

std::uint64_t RuleStore::revision() const {
    std::shared_lock lock(mutex_);
    return state_.revision;
}

Rule RuleStore::get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    for (const auto& r : state_.rules) {
        if (r.id == id) return r;
    }
    throw NotFound("no rule with id '" + id + "'");
}

void RuleStore::set_fault_hook(FaultHook hook) {
    std::unique_lock lock(mutex_);
    fault_ = std::move(hook);
}

MutationResult RuleStore::apply(const Mutation& mutation, std::optional<std::uint64_t> expected_revision) {
    std::unique_lock lock(mutex_);
    if (expected_revision && *expected_revision != state_.revision) {
        throw StaleRevision("revision " + std::to_string(*expected_revision) + " is stale; current revision is " +
                            std::to_string(state_.revision));
    }
    StoreSnapshot next = state_;
    MutationResult result;
    auto find = [&](const std::string& id) {
        auto it = std::find_if(next.rules.begin(), next.rules.end(), [&](const Rule& r) { return r.id == id; });
        if (it == next.rules.end()) throw NotFound("no rule with id '" + id + "'");
        return it;
    };

    if (const auto* add = std::get_if<AddRule>(&mutation)) {
        Rule rule = canonicalize(add->rule);
        rule.id = "r" + std::to_string(next.next_id);
        require_valid(std::span<const Rule>(&rule, 1), registry_);
        ++next.next_id;
        next.rules.push_back(rule);
        result.id = rule.id;
        result.rule = std::move(rule);
    } else if (const auto* replace = std::get_if<ReplaceRule>(&mutation)) {
        auto it = find(replace->id);
        Rule rule = canonicalize(replace->rule);
        rule.id = replace->id;
        require_valid(std::span<const Rule>(&rule, 1), registry_);
        *it = rule;
        result.id = rule.id;
        result.rule = std::move(rule);
    } else {
        const auto& del = std::get<DeleteRule>(mutation);
        next.rules.erase(find(del.id));
        result.id = del.id;
    }
    std::sort(next.rules.begin(), next.rules.end(), [](const Rule& a, const Rule& b) { return rule_id_less(a.id, b.id); });
    ++next.revision;
    persist(next);
    state_ = std::move(next);
    result.revision = state_.revision;
    return result;
}

MutationResult RuleStore::add(Rule rule, std::optional<std::uint64_t> expected_revision) {
    return apply(AddRule{std::move(rule)}, expected_revision);
}

MutationResult RuleStore::replace(const std::string& id, Rule rule, std::optional<std::uint64_t> expected_revision) {
    return apply(ReplaceRule{id, std::move(rule)}, expected_revision);
}

MutationResult RuleStore::remove(const std::string& id, std::optional<std::uint64_t> expected_revision) {
    return apply(DeleteRule{id}, expected_revision);
}

void RuleStore::persist(const StoreSnapshot& next) {
    const std::filesystem::path tmp = path_.string() + ".tmp";
    const std::string text = store_to_json(next).dump(2) + "\n";
    auto fault = [&](WriteStage stage) {
        if (fault_) fault_(stage);
    };

    Fd fd(::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
    if (fd.get() < 0) throw StorageError(errno_message("cannot create", tmp));
    try {
        fault(WriteStage::TempOpened);
        write_all(fd.get(), text, tmp);
        fault(WriteStage::TempWritten);
        if (::fsync(fd.get()) != 0) throw StorageError(errno_message("cannot sync", tmp));
        fault(WriteStage::TempSynced);
        if (::close(fd.release()) != 0) throw StorageError(errno_message("cannot close", tmp));
        if (::rename(tmp.c_str(), path_.c_str()) != 0) throw StorageError(errno_message("cannot rename", tmp));
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
    sync_directory(dir_);
    fault(WriteStage::Renamed);
}

}  // namespace sensation
