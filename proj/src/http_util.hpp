#pragma once

#include <optional>
#include <string>

namespace tqa::detail {

struct HttpTarget {
  std::string host;
  int port = 80;
  std::string path = "/";
};

// http://host[:port][/path]; https is out of scope for the desk harness.
inline std::optional<HttpTarget> parse_http_url(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) return std::nullopt;
  HttpTarget target;
  std::string rest = url.substr(scheme.size());
  auto slash = rest.find('/');
  std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
  if (slash != std::string::npos) target.path = rest.substr(slash);
  auto colon = authority.rfind(':');
  if (colon != std::string::npos) {
    target.host = authority.substr(0, colon);
    try {
      target.port = std::stoi(authority.substr(colon + 1));
    } catch (...) {
      return std::nullopt;
    }
  } else {
    target.host = authority;
  }
  if (target.host.empty()) return std::nullopt;
  return target;
}

}  // namespace tqa::detail
