#include "patimt/translator.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>

namespace patimt {

using nlohmann::json;

DictionaryTranslator DictionaryTranslator::from_json(std::string_view bytes)
{
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        throw ParseError(0, "<document>", e.what());
    }
    if (!doc.is_object())
        throw ParseError(0, "<document>", "dictionary must be a JSON object");
    std::map<std::string, std::string> table;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!it.value().is_string())
            throw ParseError(0, it.key(), "translation is not a string");
        table.emplace(it.key(), it.value().get<std::string>());
    }
    return DictionaryTranslator(std::move(table));
}

std::string DictionaryTranslator::translate(const std::string& text, LangPair)
{
    auto it = table_.find(text);
    if (it == table_.end())
        throw TranslatorError("no dictionary entry for '" + text + "'");
    return it->second;
}

HttpTranslator::HttpTranslator(std::string endpoint, std::string token_env, std::chrono::milliseconds timeout)
    : timeout_(timeout)
{
    const auto scheme = endpoint.find("://");
    if (scheme == std::string::npos)
        throw InvalidArgument("translator endpoint must be a URL: " + endpoint);
    const auto slash = endpoint.find('/', scheme + 3);
    scheme_host_port_ = endpoint.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : endpoint.substr(slash);
    if (const char* tok = std::getenv(token_env.c_str()))
        token_ = tok;
}

std::string HttpTranslator::translate(const std::string& text, LangPair pair)
{
    httplib::Client client(scheme_host_port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!token_.empty())
        headers.emplace("Authorization", "Bearer " + token_);

    const json body = {{"text", text},
                       {"source", pair == LangPair::EnZh ? "en" : "zh"},
                       {"target", pair == LangPair::EnZh ? "zh" : "en"}};
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res)
        throw TranslatorError("translator request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw TranslatorError("translator returned HTTP " + std::to_string(res->status));
    try {
        const auto reply = json::parse(res->body);
        if (!reply.contains("translation") || !reply["translation"].is_string())
            throw TranslatorError("translator reply has no 'translation' string");
        return reply["translation"].get<std::string>();
    } catch (const json::exception& e) {
        throw TranslatorError(std::string("malformed translator reply: ") + e.what());
    }
}

std::unique_ptr<Translator> make_translator(const std::string& spec)
{
    if (spec.rfind("dict:", 0) == 0)
        return std::make_unique<DictionaryTranslator>(DictionaryTranslator::from_json(read_file(spec.substr(5))));
    if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0)
        return std::make_unique<HttpTranslator>(spec);
    throw InvalidArgument("unknown translator '" + spec + "' (expected dict:PATH or an http URL)");
}

TranslationOutcome translate_blocks(std::vector<LayoutBlock> blocks, Translator& translator, LangPair pair)
{
    TranslationOutcome out;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        auto& b = blocks[i];
        if (b.kind != BlockKind::Text || !b.text || b.translation)
            continue;
        try {
            b.translation = translator.translate(*b.text, pair);
        } catch (const std::exception& e) {
            out.errors.push_back("block " + std::to_string(i) + ": " + e.what());
        }
    }
    out.blocks = std::move(blocks);
    return out;
}

} // namespace patimt
