#pragma once

#include <memory>
#include <string>

#include "surgscan/service/service.hpp"

namespace httplib {
class Server;
}

namespace surgscan::service {

/// REST adapter over Service.
///
///   POST  /api/login                  {"email","password"}
///   POST  /api/batches
///   POST  /api/batches/{n}/images     multipart field "image" (or a raw body)
///   GET   /api/batches/{n}/stats
///   POST  /api/batches/{n}/close
///   GET   /api/admin/users
///   PATCH /api/admin/users/{id}       {"status": "active" | "inactive"}
///   GET   /api/admin/overview
///
/// Errors are {"error": code, "message": text} with the matching status.
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<Service> service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds without serving; port 0 picks a free port. Returns the bound
  /// port. Throws IoFailure when the address is unavailable.
  int bind(const std::string& host, int port);
  /// Serves until stop(); blocks.
  void run();
  void stop();
  bool running() const;

 private:
  std::shared_ptr<Service> service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace surgscan::service
