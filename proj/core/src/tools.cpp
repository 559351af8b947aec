// SPDX-License-Identifier: Apache-2.0
#include "taskforge/tools.hpp"

#ifdef TASKFORGE_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <zlib.h>

#include "httplib.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "taskforge/errors.hpp"
#include "taskforge/text.hpp"

namespace taskforge {

namespace fs = std::filesystem;

namespace {

std::string context_key(ToolKind tool, const std::string& value) {
    return to_string(tool) + '\x1f' + text::normalize(value);
}

std::int64_t now_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string inflate_stream(const std::string& data) {
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) throw ToolError("zlib init failed");
    std::string out;
    char buffer[16384];
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    int ret = Z_OK;
    do {
        zs.next_out = reinterpret_cast<Bytef*>(buffer);
        zs.avail_out = sizeof(buffer);
        ret = inflate(&zs, Z_NO_FLUSH);
        if (ret != Z_OK && ret != Z_STREAM_END) {
            inflateEnd(&zs);
            throw ToolError("zlib inflate failed on PDF stream");
        }
        out.append(buffer, sizeof(buffer) - zs.avail_out);
    } while (ret != Z_STREAM_END && zs.avail_in > 0);
    inflateEnd(&zs);
    return out;
}

// Pulls literal strings used by Tj/TJ/' operators out of a content stream.
std::string extract_text_ops(const std::string& stream) {
    std::string out;
    std::size_t i = 0;
    std::string pending;
    while (i < stream.size()) {
        char c = stream[i];
        if (c == '(') {
            std::string lit;
            int depth = 1;
            ++i;
            while (i < stream.size() && depth > 0) {
                char d = stream[i];
                if (d == '\\' && i + 1 < stream.size()) {
                    char e = stream[i + 1];
                    if (e == 'n') lit.push_back('\n');
                    else if (e == 't') lit.push_back('\t');
                    else if (e == 'r') lit.push_back('\r');
                    else lit.push_back(e);
                    i += 2;
                    continue;
                }
                if (d == '(') ++depth;
                if (d == ')') {
                    --depth;
                    if (depth == 0) break;
                }
                lit.push_back(d);
                ++i;
            }
            pending += lit;
            ++i;
        } else if (c == 'T' && i + 1 < stream.size() &&
                   (stream[i + 1] == 'j' || stream[i + 1] == 'J')) {
            if (!pending.empty()) {
                if (!out.empty()) out.push_back(' ');
                out += pending;
                pending.clear();
            }
            i += 2;
        } else {
            ++i;
        }
    }
    return out;
}

std::string strip_html(const std::string& html) {
    std::string out;
    bool in_tag = false;
    bool in_script = false;
    std::string lower = text::normalize(html);
    for (std::size_t i = 0; i < html.size(); ++i) {
        char c = html[i];
        if (c == '<') {
            in_tag = true;
            if (lower.compare(i, 7, "<script") == 0 || lower.compare(i, 6, "<style") == 0) {
                in_script = true;
            }
            if (lower.compare(i, 9, "</script>") == 0 || lower.compare(i, 8, "</style>") == 0) {
                in_script = false;
            }
            continue;
        }
        if (c == '>') {
            in_tag = false;
            continue;
        }
        if (!in_tag && !in_script) out.push_back(c);
    }
    return text::trim(out);
}

// Splits "http(s)://host[:port]/path?query" into origin and target.
std::pair<std::string, std::string> split_url(const std::string& url) {
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw InvalidArgumentError("not a URL: " + url);
    std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string http_get(const std::string& url, const LiveToolOptions& options) {
    auto [origin, target] = split_url(url);
    httplib::Client client(origin);
    client.set_connection_timeout(options.timeout_seconds);
    client.set_read_timeout(options.timeout_seconds);
    client.set_follow_location(true);
    httplib::Headers headers{{"User-Agent", options.user_agent}};
    auto response = client.Get(target, headers);
    if (!response) throw RetryableError("transport failure fetching " + url);
    if (response->status == 404) throw NotFoundError("HTTP 404: " + url);
    if (response->status >= 500) {
        throw RetryableError("HTTP " + std::to_string(response->status) + ": " + url);
    }
    if (response->status >= 400) {
        throw ToolError("HTTP " + std::to_string(response->status) + ": " + url);
    }
    return response->body;
}

}  // namespace

std::string extract_pdf_text(const std::string& bytes) {
    if (bytes.rfind("%PDF", 0) != 0) throw ToolError("not a PDF file");
    std::string combined;
    std::size_t pos = 0;
    while ((pos = bytes.find("stream", pos)) != std::string::npos) {
        // Locate the dictionary immediately preceding this stream keyword.
        std::size_t dict_start = bytes.rfind("<<", pos);
        std::string dict = dict_start == std::string::npos
                               ? std::string{}
                               : bytes.substr(dict_start, pos - dict_start);
        std::size_t data_start = pos + 6;
        if (data_start < bytes.size() && bytes[data_start] == '\r') ++data_start;
        if (data_start < bytes.size() && bytes[data_start] == '\n') ++data_start;
        std::size_t data_end = bytes.find("endstream", data_start);
        if (data_end == std::string::npos) break;
        std::string data = bytes.substr(data_start, data_end - data_start);
        pos = data_end + 9;

        std::string content;
        if (dict.find("/FlateDecode") != std::string::npos) {
            try {
                content = inflate_stream(data);
            } catch (const ToolError&) {
                continue;  // e.g. an image XObject, not a content stream
            }
        } else if (dict.find("/Filter") == std::string::npos) {
            content = data;
        } else {
            continue;  // unsupported filter
        }
        std::string extracted = extract_text_ops(content);
        if (!extracted.empty()) {
            if (!combined.empty()) combined.push_back('\n');
            combined += extracted;
        }
    }
    if (text::trim(combined).empty()) {
        throw ToolError("PDF has no extractable text layer");
    }
    return combined;
}

void ScriptedToolBackend::add_context(ToolKind tool, const std::string& value,
                                      const std::string& content) {
    contexts_[context_key(tool, value)] = content;
}

void ScriptedToolBackend::add_search(const std::string& query,
                                     std::vector<SearchResult> results) {
    searches_[text::normalize(query)] = std::move(results);
}

void ScriptedToolBackend::load_file(const std::string& path) {
    auto doc = nlohmann::json::parse(read_file(path));
    for (const auto& item : doc.value("contexts", nlohmann::json::array())) {
        add_context(tool_kind_from_string(item.at("tool").get<std::string>()),
                    item.at("value").get<std::string>(),
                    item.at("content").get<std::string>());
    }
    for (const auto& item : doc.value("searches", nlohmann::json::array())) {
        std::vector<SearchResult> results;
        for (const auto& r : item.at("results")) {
            results.push_back(SearchResult{r.at("title").get<std::string>(),
                                           r.value("snippet", std::string{}),
                                           r.at("locator").get<std::string>()});
        }
        add_search(item.at("query").get<std::string>(), std::move(results));
    }
}

ToolContext ScriptedToolBackend::fetch(const InputIndex& index) {
    auto it = contexts_.find(context_key(index.tool, index.value));
    if (it == contexts_.end()) {
        throw NotFoundError("no scripted context for (" + to_string(index.tool) + ", " +
                            index.value + ")");
    }
    return ToolContext{it->second, index, 0};
}

std::vector<SearchResult> ScriptedToolBackend::search(const std::string& query, int k) {
    auto it = searches_.find(text::normalize(query));
    if (it == searches_.end()) return {};
    std::vector<SearchResult> out = it->second;
    if (static_cast<int>(out.size()) > k) out.resize(static_cast<std::size_t>(k));
    return out;
}

LiveToolBackend::LiveToolBackend(LiveToolOptions options, std::shared_ptr<Gateway> gateway)
    : options_(std::move(options)), gateway_(std::move(gateway)) {}

ToolContext LiveToolBackend::fetch(const InputIndex& index) {
    switch (index.tool) {
        case ToolKind::pdf_read: {
            if (!fs::exists(index.value)) throw NotFoundError("PDF not found: " + index.value);
            return ToolContext{extract_pdf_text(read_file(index.value)), index, now_seconds()};
        }
        case ToolKind::image_understand: {
            if (!fs::exists(index.value)) throw NotFoundError("image not found: " + index.value);
            if (!gateway_) throw ToolError("image understanding requires a model gateway");
            auto result = gateway_->complete(
                ModelRole::agent,
                "Describe the key information, trends, and figures visible in the image at: " +
                    index.value);
            return ToolContext{result.text, index, now_seconds()};
        }
        case ToolKind::web_browse: {
            if (index.value.rfind("http", 0) != 0) {
                if (fs::exists(index.value)) {
                    return ToolContext{strip_html(read_file(index.value)), index, now_seconds()};
                }
                throw NotFoundError("web index must be a URL or local file: " + index.value);
            }
            return ToolContext{strip_html(http_get(index.value, options_)), index,
                               now_seconds()};
        }
        case ToolKind::search:
            throw InvalidArgumentError("search runs through search(), not execute_tool");
    }
    throw ToolError("unreachable tool kind");
}

std::vector<SearchResult> LiveToolBackend::search(const std::string& query, int k) {
    if (options_.search_endpoint.empty()) {
        throw ToolError("no search endpoint configured");
    }
    std::string url = options_.search_endpoint;
    url += url.find('?') == std::string::npos ? '?' : '&';
    url += "q=" + httplib::detail::encode_query_param(query) + "&k=" + std::to_string(k);
    auto doc = nlohmann::json::parse(http_get(url, options_));
    const auto& items = doc.is_array() ? doc : doc.at("results");
    std::vector<SearchResult> out;
    for (const auto& item : items) {
        SearchResult r;
        r.title = item.value("title", std::string{});
        r.snippet = item.contains("snippet") ? item.at("snippet").get<std::string>()
                                             : item.value("content", std::string{});
        r.locator = item.contains("locator") ? item.at("locator").get<std::string>()
                                             : item.value("url", std::string{});
        out.push_back(std::move(r));
        if (static_cast<int>(out.size()) >= k) break;
    }
    return out;
}

ToolAdapters::ToolAdapters(std::shared_ptr<ToolBackend> backend)
    : backend_(std::move(backend)) {
    if (!backend_) throw InvalidArgumentError("tool adapters require a backend");
}

ToolContext ToolAdapters::execute_tool(const InputIndex& index) {
    if (text::trim(index.value).empty()) {
        throw InvalidArgumentError("input index value is empty");
    }
    const std::string key = context_key(index.tool, index.value);
    {
        std::lock_guard lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    ToolContext context = backend_->fetch(index);
    context.source_index = index;
    if (text::trim(context.content).empty()) {
        throw EmptyContextError("tool returned empty context for: " + index.value);
    }
    std::lock_guard lock(mu_);
    auto [it, inserted] = cache_.emplace(key, std::move(context));
    return it->second;
}

std::vector<SearchResult> ToolAdapters::search(const std::string& query, int k) {
    if (text::trim(query).empty()) throw InvalidArgumentError("empty search query");
    if (k < 1) throw InvalidArgumentError("k must be >= 1");
    auto results = backend_->search(query, k);
    if (static_cast<int>(results.size()) > k) results.resize(static_cast<std::size_t>(k));
    return results;
}

}  // namespace taskforge
