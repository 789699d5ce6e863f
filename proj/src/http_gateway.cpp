#include <cstdlib>

#include <httplib.h>

#include "pccloud/error.hpp"
#include "pccloud/indexing.hpp"

namespace pccloud::indexing {

namespace {

class HttpsGateway : public HttpGateway {
public:
    explicit HttpsGateway(std::chrono::seconds timeout) : timeout_(timeout) {}

    HttpResponse get(const std::string& url) override
    {
        const auto schemeEnd = url.find("://");
        const auto pathStart = schemeEnd == std::string::npos ? std::string::npos : url.find('/', schemeEnd + 3);
        if (pathStart == std::string::npos)
            throw Error(ErrorKind::Parameter, "unsupported url " + url);

        httplib::Client client(url.substr(0, pathStart));
        client.set_connection_timeout(timeout_);
        client.set_read_timeout(timeout_);
        client.set_follow_location(true);

        httplib::Headers headers = {{"User-Agent", "pccloud/1.0"}, {"Accept", "application/json"}};
        if (url.find("api.semanticscholar.org") != std::string::npos)
            if (const char* key = std::getenv("S2_API_KEY"); key && *key)
                headers.emplace("x-api-key", key);

        auto res = client.Get(url.substr(pathStart), headers);
        if (!res)
            throw Error(ErrorKind::Network, "GET " + url + " failed: " + httplib::to_string(res.error()));
        return {res->status, res->body};
    }

private:
    std::chrono::seconds timeout_;
};

}  // namespace

std::shared_ptr<HttpGateway> makeHttpsGateway(std::chrono::seconds timeout)
{
    return std::make_shared<HttpsGateway>(timeout);
}

}  // namespace pccloud::indexing
