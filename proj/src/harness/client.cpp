#include "metacog/harness/client.hpp"

#include <stdexcept>

#include <httplib.h>

namespace metacog::harness {

using nlohmann::json;

HttpChatClient::HttpChatClient(std::string endpoint_url, std::optional<std::string> api_key, int timeout_seconds)
    : api_key_(std::move(api_key)), timeout_seconds_(timeout_seconds) {
    const auto scheme_end = endpoint_url.find("://");
    if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint_url needs a scheme: " + endpoint_url);
    const auto path_start = endpoint_url.find('/', scheme_end + 3);
    origin_ = endpoint_url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : endpoint_url.substr(path_start);
}

json chat_request_body(const ChatRequest& request) {
    json body = request.decoding.is_object() ? request.decoding : json::object();
    body["model"] = request.model;
    body["messages"] = json::array({{{"role", "user"}, {"content", request.prompt}}});
    return body;
}

ChatResponse HttpChatClient::complete(const ChatRequest& request) {
    // A client per call: httplib clients are not shareable across threads.
    httplib::Client cli(origin_);
    cli.set_connection_timeout(timeout_seconds_);
    cli.set_read_timeout(timeout_seconds_);
    cli.set_write_timeout(timeout_seconds_);
    httplib::Headers headers;
    if (api_key_) headers.emplace("Authorization", "Bearer " + *api_key_);

    ChatResponse out;
    const auto res = cli.Post(path_, headers, chat_request_body(request).dump(), "application/json");
    if (!res) {
        out.error = "transport: " + httplib::to_string(res.error());
        return out;
    }
    out.http_status = res->status;
    if (res->status != 200) {
        out.error = "http " + std::to_string(res->status);
        return out;
    }
    try {
        const auto j = json::parse(res->body);
        out.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        out.error = std::string("malformed completion payload: ") + e.what();
    }
    return out;
}

}  // namespace metacog::harness
