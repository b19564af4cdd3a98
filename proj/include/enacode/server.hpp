#pragma once

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace httplib {
class Server;
}

namespace enacode::service {

inline constexpr int kDefaultPort = 8080;

/// ENACODE_PORT when set and valid, else `fallback`.
int port_from_env(int fallback = kDefaultPort);

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> params;
  std::string body;
};

struct Response {
  int status = 200;
  nlohmann::json body;
};

/// Transport-free JSON API over a directory of runs. A run is any directory
/// holding a run manifest: the root itself or one of its children.
class Api {
public:
  explicit Api(std::filesystem::path root);

  Response handle(const Request& request);

  /// Run id -> directory, rescanned on every call.
  std::map<std::string, std::filesystem::path> runs() const;

private:
  struct RunLocks {
    std::mutex writer;       // one scheme edit at a time; contenders get 409
    std::shared_mutex files; // readers vs. publishing a recompute
  };

  std::filesystem::path root_;
  std::mutex locks_guard_;
  std::map<std::string, std::unique_ptr<RunLocks>> locks_;

  RunLocks& locks_for(const std::string& id);
  Response list_runs() const;
  Response get_artifact(const std::string& id, const std::filesystem::path& dir,
                        const std::string& what, const Request& req);
  Response put_scheme(const std::string& id, const std::filesystem::path& dir, const Request& req);
};

/// HTTP front end for Api.
class Server {
public:
  explicit Server(std::filesystem::path root, std::optional<std::filesystem::path> static_dir = {});
  ~Server();

  /// Binds to host:port (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();
  void wait_until_ready() const;

private:
  Api api_;
  std::unique_ptr<httplib::Server> http_;
};

} // namespace enacode::service
