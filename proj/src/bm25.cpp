#include "refeed/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "refeed/errors.hpp"

namespace refeed::bm25 {

namespace {

constexpr char kMagic[8] = {'R', 'F', 'B', 'M', '2', '5', 'I', 'X'};
constexpr std::uint32_t kVersion = 1;

bool is_alnum_ascii(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char lower_ascii(unsigned char c) {
    if (c >= 'A' && c <= 'Z') return static_cast<char>(c - 'A' + 'a');
    return static_cast<char>(c);
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw Error("truncated index file");
}

void write_string(std::ostream& out, const std::string& s) {
    write_pod(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    std::uint32_t len = 0;
    read_pod(in, len);
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw Error("truncated index file");
    return s;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (is_alnum_ascii(c)) {
            current.push_back(lower_ascii(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

Bm25Index Bm25Index::build(const corpus::CorpusStore& store, Bm25Params params) {
    if (store.passages().empty()) throw Error("cannot build index over an empty corpus");

    Bm25Index index;
    index.params_ = params;
    index.doc_ids_.reserve(store.passages().size());
    for (const auto& p : store.passages()) index.doc_ids_.push_back(p.id);
    std::sort(index.doc_ids_.begin(), index.doc_ids_.end());

    index.doc_lengths_.assign(index.doc_ids_.size(), 0);
    index.id_to_idx_.reserve(index.doc_ids_.size());
    for (std::uint32_t i = 0; i < index.doc_ids_.size(); ++i) {
        index.id_to_idx_.emplace(index.doc_ids_[i], i);
    }

    // Building in doc-index order keeps every postings list sorted by
    // passage_id without a final sort.
    std::vector<const corpus::Passage*> by_idx(index.doc_ids_.size());
    for (const auto& p : store.passages()) by_idx[index.id_to_idx_.at(p.id)] = &p;

    std::unordered_map<std::string, std::uint32_t> tf_counts;
    for (std::uint32_t idx = 0; idx < by_idx.size(); ++idx) {
        const auto tokens = tokenize(by_idx[idx]->text);
        index.doc_lengths_[idx] = static_cast<std::uint32_t>(tokens.size());
        tf_counts.clear();
        for (const auto& t : tokens) ++tf_counts[t];
        for (const auto& [term, tf] : tf_counts) {
            index.postings_[term].push_back(Posting{idx, tf});
        }
    }
    index.finalize_stats();
    return index;
}

void Bm25Index::finalize_stats() {
    std::uint64_t total = 0;
    for (auto len : doc_lengths_) total += len;
    avg_doc_length_ =
        doc_lengths_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(doc_lengths_.size());
}

std::uint32_t Bm25Index::doc_length(const std::string& passage_id) const {
    auto it = id_to_idx_.find(passage_id);
    if (it == id_to_idx_.end()) throw NotFoundError("passage '" + passage_id + "' not indexed");
    return doc_lengths_[it->second];
}

std::vector<ScoredDoc> Bm25Index::search(std::string_view query, int k) const {
    if (k < 1) throw std::invalid_argument("search requires k >= 1");

    const auto query_tokens = tokenize(query);
    const double n_docs = static_cast<double>(doc_ids_.size());

    std::unordered_map<std::uint32_t, double> scores;
    for (const auto& term : query_tokens) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const auto& plist = it->second;
        const double df = static_cast<double>(plist.size());
        const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
        for (const auto& posting : plist) {
            const double tf = static_cast<double>(posting.tf);
            const double dl = static_cast<double>(doc_lengths_[posting.doc]);
            const double norm =
                1.0 - params_.b + params_.b * (avg_doc_length_ > 0.0 ? dl / avg_doc_length_ : 0.0);
            scores[posting.doc] += idf * (tf * (params_.k1 + 1.0)) / (tf + params_.k1 * norm);
        }
    }

    std::vector<std::pair<std::uint32_t, double>> hits;
    hits.reserve(scores.size());
    for (const auto& [doc, score] : scores) {
        if (score > 0.0) hits.emplace_back(doc, score);
    }
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;  // doc indices are in passage_id order
    });
    if (hits.size() > static_cast<std::size_t>(k)) hits.resize(static_cast<std::size_t>(k));

    std::vector<ScoredDoc> out;
    out.reserve(hits.size());
    for (const auto& [doc, score] : hits) out.push_back(ScoredDoc{doc_ids_[doc], score});
    return out;
}

void Bm25Index::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");

    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kVersion);
    write_pod(out, params_.k1);
    write_pod(out, params_.b);
    write_pod(out, static_cast<std::uint64_t>(doc_ids_.size()));
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        write_string(out, doc_ids_[i]);
        write_pod(out, doc_lengths_[i]);
    }
    write_pod(out, static_cast<std::uint64_t>(postings_.size()));
    for (const auto& [term, plist] : postings_) {
        write_string(out, term);
        write_pod(out, static_cast<std::uint64_t>(plist.size()));
        for (const auto& p : plist) {
            write_pod(out, p.doc);
            write_pod(out, p.tf);
        }
    }
    out.flush();
    if (!out) throw Error("write failure for " + path.string());
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot open index " + path.string());

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
        throw Error("not a BM25 index file: " + path.string());
    }
    std::uint32_t version = 0;
    read_pod(in, version);
    if (version != kVersion) {
        throw Error("unsupported index version " + std::to_string(version));
    }

    Bm25Index index;
    read_pod(in, index.params_.k1);
    read_pod(in, index.params_.b);
    std::uint64_t num_docs = 0;
    read_pod(in, num_docs);
    index.doc_ids_.reserve(num_docs);
    index.doc_lengths_.reserve(num_docs);
    for (std::uint64_t i = 0; i < num_docs; ++i) {
        index.doc_ids_.push_back(read_string(in));
        std::uint32_t len = 0;
        read_pod(in, len);
        index.doc_lengths_.push_back(len);
        index.id_to_idx_.emplace(index.doc_ids_.back(), static_cast<std::uint32_t>(i));
    }
    std::uint64_t num_terms = 0;
    read_pod(in, num_terms);
    for (std::uint64_t i = 0; i < num_terms; ++i) {
        std::string term = read_string(in);
        std::uint64_t n_postings = 0;
        read_pod(in, n_postings);
        std::vector<Posting> plist;
        plist.reserve(n_postings);
        for (std::uint64_t j = 0; j < n_postings; ++j) {
            Posting p;
            read_pod(in, p.doc);
            read_pod(in, p.tf);
            plist.push_back(p);
        }
        index.postings_.emplace(std::move(term), std::move(plist));
    }
    index.finalize_stats();
    return index;
}

}  // namespace refeed::bm25
