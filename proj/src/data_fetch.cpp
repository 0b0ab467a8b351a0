// Kept apart from the parsers so only this unit pulls in the HTTP client.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <stdexcept>

#include "trendshift/data_io.hpp"

namespace trendshift {

std::string fetch_url(const std::string& url, std::chrono::seconds timeout) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::runtime_error("not a URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_follow_location(true);
  auto res = client.Get(path);
  if (!res) throw std::runtime_error("download failed for " + url + ": " + httplib::to_string(res.error()));
  if (res->status != 200) throw std::runtime_error("download failed for " + url + ": HTTP " + std::to_string(res->status));
  return res->body;
}

}  // namespace trendshift
