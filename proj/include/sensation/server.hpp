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
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "sensation/api.hpp"
#include "sensation/error.hpp"

namespace sensation {

class BindError : public Error {
public:
    using Error::Error;
};

struct ServeConfig {
    std::string host = "127.0.0.1";
    /// 0 picks a free port.
    int port = 8080;
    std::filesystem::path data_dir = "data";
    /// Registry file; the built-in smart-home-v1 registry when unset.
    std::optional<std::filesystem::path> registry_path;
};

/// A listening service. Destruction stops it.
class ServiceHandle {
public:
    virtual ~ServiceHandle() = default;
    virtual int port() const noexcept = 0;
    virtual Api& api() noexcept = 0;
    virtual void stop() = 0;
    /// Blocks until stop() is called from another thread.
    virtual void wait() = 0;
};

/// Loads the registry, opens the store and starts listening on a background
/// thread. Registry and store failures are thrown before any socket is
/// opened; BindError if the port is taken.
std::unique_ptr<ServiceHandle> serve(const ServeConfig& config);

}  // namespace sensation
