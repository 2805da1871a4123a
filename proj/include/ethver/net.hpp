#pragma once

// Live HTTP(S) transport. Kept out of client.hpp so the bulky httplib header
// is only compiled where live mode is actually used.

#ifdef ETHVER_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <string>

#include "ethver/client.hpp"
#include "ethver/errors.hpp"

namespace ethver {

class HttplibTransport final : public Transport {
public:
    std::string get(const std::string& url) override {
        const auto split = split_url(url);
        httplib::Client client(split.first);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(30, 0);
        client.set_follow_location(true);
        auto res = client.Get(split.second);
        if (!res) {
            throw TransportError("request failed: " + httplib::to_string(res.error()));
        }
        if (res->status < 200 || res->status >= 300) {
            throw ApiError(res->status, "unexpected HTTP status");
        }
        return res->body;
    }

private:
    // "https://host/path?query" -> {"https://host", "/path?query"}
    static std::pair<std::string, std::string> split_url(const std::string& url) {
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) throw TransportError("URL missing scheme: " + url);
        const auto path_start = url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) return {url, "/"};
        return {url.substr(0, path_start), url.substr(path_start)};
    }
};

} // namespace ethver
