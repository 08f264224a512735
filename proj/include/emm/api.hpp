#pragma once

#include "emm/state.hpp"

#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace emm {

struct ApiResponse {
  int status = 200;
  std::string content_type;
  std::string body;
};

// Read-only views of the last completed round. Paths are listed in
// docs/api.md. Requests read an immutable snapshot; replace() swaps in a
// new one without disturbing requests in flight.
class Api {
 public:
  explicit Api(State state);

  void replace(State state);
  std::shared_ptr<State const> snapshot() const;

  ApiResponse handle(std::string_view path) const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<State const> state_;
};

// HTTP front end for an Api.
class ApiServer {
 public:
  explicit ApiServer(Api const& api);
  ~ApiServer();

  // Port 0 picks a free port. Returns the bound port.
  int bind(std::string const& host, int port);
  // Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace emm
