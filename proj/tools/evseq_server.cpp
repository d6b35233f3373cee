// HTTP front end. LISTEN_ADDR (host:port, default 127.0.0.1:8080), DATA_DIR
// and MAX_UPLOAD_BYTES come from the environment.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>

#include "evseq/service.hpp"

namespace {

evseq::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main() {
  std::string addr = "127.0.0.1:8080";
  if (const char* env = std::getenv("LISTEN_ADDR"); env && *env) addr = env;
  auto colon = addr.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "evseq-server: LISTEN_ADDR must be host:port\n";
    return 1;
  }
  std::string host = addr.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(addr.substr(colon + 1));
  } catch (const std::exception&) {
    std::cerr << "evseq-server: bad port in LISTEN_ADDR\n";
    return 1;
  }

  evseq::ServiceConfig cfg = evseq::ServiceConfig::from_environment();
  evseq::Service service(cfg);
  evseq::HttpServer server(service, cfg.max_upload_bytes);
  int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "evseq-server: cannot bind " << addr << '\n';
    return 2;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on " << host << ':' << bound << std::endl;
  server.listen();
  return 0;
}
