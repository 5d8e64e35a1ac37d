#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace refeed::corpus {

/// A fixed-size chunk of a raw document; the unit of retrieval.
struct Passage {
    std::string id;          // "<doc_id>#<offset>", unique within a corpus
    std::string title;       // raw document title, copied to every chunk
    std::string text;        // at most chunk_size whitespace tokens
    std::string source_doc;  // id of the originating raw document
    int offset = 0;          // 0-based chunk index within source_doc
};

struct QaExample {
    std::string id;
    std::string question;
    std::vector<std::string> answers;  // gold answers, at least one
};

struct DialogueExample {
    std::string id;
    std::vector<std::string> history;  // prior turns, oldest first
    std::string reference;             // gold response
};

struct CorpusStats {
    std::uint64_t num_raw_docs = 0;
    std::uint64_t num_passages = 0;
    std::uint64_t total_tokens = 0;
};

/// Maximal non-whitespace runs, in order. The chunking tokenizer; BM25 has
/// its own.
std::vector<std::string> whitespace_tokens(std::string_view text);

/// Immutable passage store backed by a directory of `passages.jsonl` plus
/// `manifest.json`. Ingestion is single-writer; an opened store is safe for
/// unlimited concurrent readers.
class CorpusStore {
public:
    /// Splits every raw document from `input` (line-delimited records with
    /// `id`, optional `title`, `text`) into consecutive passages of at most
    /// `chunk_size` whitespace tokens and persists them under `dir`.
    /// Throws IngestError on malformed records (with the line number) and on
    /// duplicate raw document ids.
    static CorpusStats ingest(std::istream& input, const std::filesystem::path& dir,
                              int chunk_size = 100);
    static CorpusStats ingest_file(const std::filesystem::path& raw_path,
                                   const std::filesystem::path& dir, int chunk_size = 100);

    /// Loads a previously ingested store.
    static CorpusStore open(const std::filesystem::path& dir);

    /// Throws NotFoundError for unknown ids.
    const Passage& get_passage(const std::string& id) const;
    bool has_passage(const std::string& id) const;

    const std::vector<Passage>& passages() const noexcept { return passages_; }
    const CorpusStats& stats() const noexcept { return stats_; }
    int chunk_size() const noexcept { return chunk_size_; }
    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    CorpusStore() = default;

    std::vector<Passage> passages_;  // ingestion order
    std::unordered_map<std::string, std::size_t> by_id_;
    CorpusStats stats_;
    int chunk_size_ = 0;
    std::filesystem::path dir_;
};

/// Order-preserving loaders for line-delimited datasets. Schema violations
/// raise SchemaError naming the line number.
std::vector<QaExample> load_qa_dataset(const std::filesystem::path& path);
std::vector<DialogueExample> load_dialogue_dataset(const std::filesystem::path& path);

/// Serialization used by the dataset writers and round-trip tests.
std::string to_jsonl_line(const QaExample& ex);
std::string to_jsonl_line(const DialogueExample& ex);
void save_qa_dataset(const std::filesystem::path& path, const std::vector<QaExample>& examples);
void save_dialogue_dataset(const std::filesystem::path& path,
                           const std::vector<DialogueExample>& examples);

}  // namespace refeed::corpus
