#include "wpg/frontends/server.hpp"

#include "wpg/error.hpp"

namespace wpg::frontends {

void mount(httplib::Server& server, AnnotationService& service) {
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse out = service.handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json; charset=utf-8");
  };
  server.Get(R"(/api/.*)", forward);
  server.Post(R"(/api/.*)", forward);
  server.Put(R"(/api/.*)", forward);
  server.Delete(R"(/api/.*)", forward);
  // The annotator UI may be served from another origin during development.
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

int bind(httplib::Server& server, const std::string& host, int port) {
  // httplib's default adds SO_REUSEPORT, which would let a second server
  // share a port that is already taken.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

}  // namespace wpg::frontends
