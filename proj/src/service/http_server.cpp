#include "surgscan/service/http_server.hpp"

#include <functional>

#include "httplib.h"

namespace surgscan::service {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxUpload = 64u << 20;

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send(res, status, json{{"error", code}, {"message", message}});
}

std::string bearer(const httplib::Request& req) {
  const std::string h = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (h.size() > kPrefix.size() && h.compare(0, kPrefix.size(), kPrefix) == 0) return h.substr(kPrefix.size());
  return {};
}

json parse_body(const httplib::Request& req) {
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw ApiError(400, "BadRequest", "request body must be a JSON object");
    return j;
  } catch (const json::parse_error&) {
    throw ApiError(400, "BadRequest", "request body is not valid JSON");
  }
}

std::string string_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw ApiError(400, "BadRequest", std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

using Handler = std::function<json(const httplib::Request&)>;

httplib::Server::Handler wrap(Handler h) {
  return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
    try {
      send(res, 200, h(req));
    } catch (const ApiError& e) {
      send_error(res, e.status(), e.code(), e.what());
    } catch (const Error& e) {
      send_error(res, 500, errc_name(e.code()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "InternalError", e.what());
    }
  };
}

}  // namespace

HttpServer::HttpServer(std::shared_ptr<Service> service)
    : service_(std::move(service)), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  Service* svc = service_.get();
  s.set_payload_max_length(kMaxUpload);
  // the default also sets SO_REUSEPORT, which lets a second server share a live port
  s.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });

  s.Post("/api/login", wrap([svc](const httplib::Request& req) {
           const json body = parse_body(req);
           return svc->login(string_field(body, "email"), string_field(body, "password"));
         }));
  s.Post("/api/batches", wrap([svc](const httplib::Request& req) { return svc->create_batch(bearer(req)); }));
  s.Post(R"(/api/batches/([^/]+)/images)", wrap([svc](const httplib::Request& req) {
           std::string filename;
           std::string content;
           if (req.is_multipart_form_data()) {
             if (!req.has_file("image")) throw ApiError(400, "BadRequest", "multipart field 'image' is required");
             const auto file = req.get_file_value("image");
             filename = file.filename;
             content = file.content;
           } else {
             content = req.body;
             filename = req.get_header_value("X-Filename");
           }
           const auto* p = reinterpret_cast<const std::uint8_t*>(content.data());
           return svc->upload_image(bearer(req), req.matches[1], {p, content.size()}, filename);
         }));
  s.Get(R"(/api/batches/([^/]+)/stats)", wrap([svc](const httplib::Request& req) {
          return svc->batch_stats(bearer(req), req.matches[1]);
        }));
  s.Post(R"(/api/batches/([^/]+)/close)", wrap([svc](const httplib::Request& req) {
           return svc->close_batch(bearer(req), req.matches[1]);
         }));
  s.Get("/api/admin/users", wrap([svc](const httplib::Request& req) { return svc->admin_list_users(bearer(req)); }));
  s.Patch(R"(/api/admin/users/(\d+))", wrap([svc](const httplib::Request& req) {
            // a bad body surfaces as an invalid status, after the role check
            const json body = json::parse(req.body, nullptr, false);
            std::string status;
            if (body.is_object() && body.contains("status") && body["status"].is_string()) {
              status = body["status"].get<std::string>();
            }
            return svc->admin_set_status(bearer(req), std::stoll(req.matches[1]), status);
          }));
  s.Get("/api/admin/overview", wrap([svc](const httplib::Request& req) { return svc->admin_overview(bearer(req)); }));

  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) {
      send_error(res, 404, "NotFound", "no such endpoint");
    } else if (res.status == 413) {
      send_error(res, 413, "PayloadTooLarge", "upload exceeds the size limit");
    } else if (res.status >= 400) {
      send_error(res, res.status, "BadRequest", "request rejected");
    }
  });
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    send_error(res, 500, "InternalError", "unhandled server error");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound <= 0) {
    throw Error(Errc::IoFailure, "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpServer::run() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

bool HttpServer::running() const { return server_->is_running(); }

}  // namespace surgscan::service
