#pragma once

#include "patimt/corpus.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace patimt {

class TranslatorError : public Error {
public:
    using Error::Error;
};

/// Client for an external machine-translation service.
class Translator {
public:
    virtual ~Translator() = default;

    /// Throws TranslatorError on failure.
    virtual std::string translate(const std::string& text, LangPair pair) = 0;

    /// Whether `translate` may be called from several threads at once.
    virtual bool concurrent() const noexcept { return false; }
};

/// Looks translations up in a fixed table. Unknown texts fail.
class DictionaryTranslator : public Translator {
public:
    explicit DictionaryTranslator(std::map<std::string, std::string> table) : table_(std::move(table)) {}

    /// Table from a JSON object {"source": "target", ...}.
    static DictionaryTranslator from_json(std::string_view bytes);

    std::string translate(const std::string& text, LangPair pair) override;
    bool concurrent() const noexcept override { return true; }

private:
    std::map<std::string, std::string> table_;
};

/// POSTs {"text", "source", "target"} as JSON to `endpoint` and reads
/// {"translation"} back. The bearer token comes from the environment
/// variable named by `token_env`.
class HttpTranslator : public Translator {
public:
    explicit HttpTranslator(std::string endpoint, std::string token_env = "PATIMT_TRANSLATOR_TOKEN",
                            std::chrono::milliseconds timeout = std::chrono::seconds(30));

    std::string translate(const std::string& text, LangPair pair) override;
    bool concurrent() const noexcept override { return true; }

private:
    std::string scheme_host_port_;
    std::string path_;
    std::string token_;
    std::chrono::milliseconds timeout_;
};

/// Build a translator from a descriptor string: "dict:PATH" or "http://..." URL.
std::unique_ptr<Translator> make_translator(const std::string& spec);

struct TranslationOutcome {
    std::vector<LayoutBlock> blocks;
    std::vector<std::string> errors; // one entry per failed block
};

/// Fill in missing translations of text blocks. Blocks that already have one
/// are left alone; failures leave the block untranslated and are recorded.
TranslationOutcome translate_blocks(std::vector<LayoutBlock> blocks, Translator& translator, LangPair pair);

} // namespace patimt
