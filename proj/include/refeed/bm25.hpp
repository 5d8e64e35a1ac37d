#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "refeed/corpus.hpp"

namespace refeed::bm25 {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct ScoredDoc {
    std::string passage_id;
    double score = 0.0;  // BM25 score, always >= 0
};

struct Posting {
    std::uint32_t doc = 0;  // index into doc_ids(), which is sorted by passage_id
    std::uint32_t tf = 0;
};

/// Lowercases and splits on every non-alphanumeric byte, dropping empty
/// pieces. ASCII-only: bytes outside [0-9A-Za-z] are separators.
std::vector<std::string> tokenize(std::string_view text);

/// From-scratch inverted index with BM25 scoring.
///
/// score(d, q) = sum over query tokens t (duplicates counted per occurrence)
/// of IDF(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl)), with
/// IDF(t) = ln(1 + (N - df + 0.5) / (df + 0.5)). The plus-one IDF keeps all
/// scores non-negative, which the pipeline's pool merge relies on.
///
/// Built once, then immutable; safe for concurrent search calls.
class Bm25Index {
public:
    /// Indexes every passage of a non-empty store. Passages that tokenize to
    /// nothing get doc_length 0 and no postings.
    static Bm25Index build(const corpus::CorpusStore& store, Bm25Params params = {});

    /// Top-k passages with positive score, sorted by (score desc, passage_id
    /// asc). k >= 1. A query with no indexed terms yields an empty list.
    std::vector<ScoredDoc> search(std::string_view query, int k) const;

    /// Binary serialization, versioned with a magic header. Deterministic:
    /// the same corpus and params always produce identical bytes.
    void save(const std::filesystem::path& path) const;
    static Bm25Index load(const std::filesystem::path& path);

    std::size_t num_docs() const noexcept { return doc_ids_.size(); }
    double avg_doc_length() const noexcept { return avg_doc_length_; }
    const Bm25Params& params() const noexcept { return params_; }
    /// Passage ids sorted ascending; postings refer into this vector.
    const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
    const std::vector<std::uint32_t>& doc_lengths() const noexcept { return doc_lengths_; }
    const std::map<std::string, std::vector<Posting>>& postings() const noexcept {
        return postings_;
    }
    /// Throws NotFoundError for ids that were never indexed.
    std::uint32_t doc_length(const std::string& passage_id) const;

private:
    Bm25Index() = default;
    void finalize_stats();

    Bm25Params params_;
    std::vector<std::string> doc_ids_;        // sorted lexicographically
    std::vector<std::uint32_t> doc_lengths_;  // parallel to doc_ids_
    std::map<std::string, std::vector<Posting>> postings_;
    std::unordered_map<std::string, std::uint32_t> id_to_idx_;
    double avg_doc_length_ = 0.0;
};

}  // namespace refeed::bm25
