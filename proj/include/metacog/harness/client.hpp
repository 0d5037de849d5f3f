#pragma once

#include <optional>
#include <string>

#include <json.hpp>

namespace metacog::harness {

struct ChatRequest {
    std::string model;
    std::string prompt;
    nlohmann::json decoding = nlohmann::json::object();  ///< merged into the request body verbatim
};

struct ChatResponse {
    int http_status = 0;  ///< 0 when the request never completed
    std::string content;  ///< choices[0].message.content on success
    std::string error;    ///< empty on success
};

/// One single-turn completion per call; implementations must be safe to
/// call concurrently.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
};

/// OpenAI-style `/chat/completions` client over HTTP(S).
class HttpChatClient : public ChatClient {
public:
    /// `endpoint_url` is the full URL, e.g. https://api.example.com/v1/chat/completions.
    HttpChatClient(std::string endpoint_url, std::optional<std::string> api_key, int timeout_seconds = 120);

    ChatResponse complete(const ChatRequest& request) override;

private:
    std::string origin_;  ///< scheme://host[:port]
    std::string path_;
    std::optional<std::string> api_key_;
    int timeout_seconds_;
};

/// Request body for a fresh one-message conversation.
nlohmann::json chat_request_body(const ChatRequest& request);

}  // namespace metacog::harness
