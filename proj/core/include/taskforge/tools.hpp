// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "taskforge/gateway.hpp"
#include "taskforge/model.hpp"

namespace taskforge {

struct SearchResult {
    std::string title;
    std::string snippet;
    std::string locator;
};

/// Raw tool transport: one fetch per call, no caching.
class ToolBackend {
public:
    virtual ~ToolBackend() = default;
    virtual ToolContext fetch(const InputIndex& index) = 0;
    virtual std::vector<SearchResult> search(const std::string& query, int k) = 0;
};

/// Closed-world fixture backend keyed by (tool, normalized input value).
/// Unknown index -> NotFoundError; unknown search query -> empty list.
class ScriptedToolBackend : public ToolBackend {
public:
    void add_context(ToolKind tool, const std::string& value, const std::string& content);
    void add_search(const std::string& query, std::vector<SearchResult> results);

    /// JSON fixture file:
    ///   {"contexts":[{"tool","value","content"}],
    ///    "searches":[{"query","results":[{"title","snippet","locator"}]}]}
    void load_file(const std::string& path);

    ToolContext fetch(const InputIndex& index) override;
    std::vector<SearchResult> search(const std::string& query, int k) override;

private:
    std::map<std::string, std::string> contexts_;  // "<tool>\x1f<normalized value>"
    std::map<std::string, std::vector<SearchResult>> searches_;
};

struct LiveToolOptions {
    std::string search_endpoint;  // GET {endpoint}?q=...&k=..., JSON results
    std::string user_agent = "taskforge/0.1";
    int timeout_seconds = 20;
};

/// Live transport: HTTP for web pages and search, local filesystem for PDFs
/// (text-extractable only) and images (described via the agent-role model).
class LiveToolBackend : public ToolBackend {
public:
    LiveToolBackend(LiveToolOptions options, std::shared_ptr<Gateway> gateway);

    ToolContext fetch(const InputIndex& index) override;
    std::vector<SearchResult> search(const std::string& query, int k) override;

private:
    LiveToolOptions options_;
    std::shared_ptr<Gateway> gateway_;
};

/// Extracts text from a PDF byte stream (plain and FlateDecode content
/// streams). Throws ToolError when no text layer is recoverable.
std::string extract_pdf_text(const std::string& bytes);

/// Caching front for tool execution. Results are idempotent within a run:
/// repeated identical calls return the first fetch byte-identically.
class ToolAdapters {
public:
    explicit ToolAdapters(std::shared_ptr<ToolBackend> backend);

    /// Turns an input index into its textual context. Empty extraction ->
    /// EmptyContextError; missing resource -> NotFoundError.
    ToolContext execute_tool(const InputIndex& index);

    /// At most k results, provider order preserved. Zero results is a valid
    /// empty list.
    std::vector<SearchResult> search(const std::string& query, int k);

private:
    std::shared_ptr<ToolBackend> backend_;
    std::mutex mu_;
    std::map<std::string, ToolContext> cache_;
};

}  // namespace taskforge
