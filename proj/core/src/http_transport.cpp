#include <httplib.h>

#include "tradepipe/alpha_vantage.hpp"
#include "tradepipe/error.hpp"

namespace tradepipe {

namespace {

class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(const std::string& base_url) {
        // Split `scheme://host[:port]` from an optional path prefix.
        const auto scheme_end = base_url.find("://");
        const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
        const auto path_start = base_url.find('/', host_start);
        if (path_start == std::string::npos) {
            origin_ = base_url;
        } else {
            origin_ = base_url.substr(0, path_start);
            prefix_ = base_url.substr(path_start);
            while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
        }
        if (origin_.empty() || host_start >= origin_.size()) {
            throw Error(ErrorCode::InvalidArgument, "bad API base URL '" + base_url + "'");
        }
    }

    HttpResponse get(const std::string& target) override {
        httplib::Client client(origin_);
        client.set_connection_timeout(10);
        client.set_read_timeout(30);
        auto res = client.Get(prefix_ + target);
        if (!res) {
            throw Error(ErrorCode::DataSource,
                        "GET " + origin_ + prefix_ + " failed: " + httplib::to_string(res.error()));
        }
        return {res->status, res->body};
    }

private:
    std::string origin_;
    std::string prefix_;
};

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(const std::string& base_url) {
    return std::make_unique<HttplibTransport>(base_url);
}

}  // namespace tradepipe
