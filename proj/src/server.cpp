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
#include "sensation/server.hpp"

#include <condition_variable>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "sensation/fixtures.hpp"
#include "sensation/io.hpp"

namespace sensation {

namespace {

class HttpService final : public ServiceHandle {
public:
    HttpService(std::unique_ptr<Api> api, const std::string& host, int port) : api_(std::move(api)) {
        auto handler = [this](const httplib::Request& req, httplib::Response& res) {
            HttpRequest request{req.method, req.path, {}, req.body};
            for (const auto& [key, value] : req.params) request.query.emplace(key, value);
            const HttpResponse response = api_->handle(request);
            res.status = response.status;
            res.set_content(response.body, "application/json");
        };
        const std::string pattern = ".*";
        server_.Get(pattern, handler);
        server_.Post(pattern, handler);
        server_.Put(pattern, handler);
        server_.Delete(pattern, handler);
        // Without SO_REUSEPORT a second server on the same port fails to bind.
        server_.set_socket_options([](socket_t sock) {
            int yes = 1;
            ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
        });

        if (port == 0) {
            port_ = server_.bind_to_any_port(host);
            if (port_ < 0) throw BindError("cannot bind to " + host);
        } else if (server_.bind_to_port(host, port)) {
            port_ = port;
        } else {
            throw BindError("cannot bind to " + host + ":" + std::to_string(port));
        }
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~HttpService() override {
        stop();
        if (thread_.joinable()) thread_.join();
    }

    int port() const noexcept override { return port_; }
    Api& api() noexcept override { return *api_; }

    void stop() override {
        server_.stop();
        std::lock_guard lock(mutex_);
        stopped_ = true;
        stopped_cv_.notify_all();
    }

    void wait() override {
        std::unique_lock lock(mutex_);
        stopped_cv_.wait(lock, [this] { return stopped_; });
    }

private:
    std::unique_ptr<Api> api_;
    httplib::Server server_;
    int port_ = -1;
    std::thread thread_;
    std::mutex mutex_;
    std::condition_variable stopped_cv_;
    bool stopped_ = false;
};

}  // namespace

std::unique_ptr<ServiceHandle> serve(const ServeConfig& config) {
    CapabilityRegistry registry = config.registry_path ? load_registry(read_text_file(config.registry_path->string()))
                                                       : fixtures::smart_home();
    auto api = std::make_unique<Api>(std::move(registry), config.data_dir);
    return std::make_unique<HttpService>(std::move(api), config.host, config.port);
}

}  // namespace sensation
