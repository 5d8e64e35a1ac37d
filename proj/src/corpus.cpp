#include "refeed/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "refeed/errors.hpp"

namespace refeed::corpus {

using nlohmann::json;

namespace {

json parse_line(const std::string& line, std::size_t line_no, const char* what) {
    json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (rec.is_discarded() || !rec.is_object()) {
        throw SchemaError(std::string(what) + ": invalid record at line " +
                          std::to_string(line_no));
    }
    return rec;
}

std::string require_string(const json& rec, const char* field, std::size_t line_no,
                           const char* what) {
    auto it = rec.find(field);
    if (it == rec.end() || !it->is_string()) {
        throw SchemaError(std::string(what) + ": missing or non-string field '" + field +
                          "' at line " + std::to_string(line_no));
    }
    return it->get<std::string>();
}

std::vector<std::string> require_string_array(const json& rec, const char* field,
                                              std::size_t line_no, const char* what) {
    auto it = rec.find(field);
    if (it == rec.end() || !it->is_array()) {
        throw SchemaError(std::string(what) + ": missing or non-array field '" + field +
                          "' at line " + std::to_string(line_no));
    }
    std::vector<std::string> out;
    out.reserve(it->size());
    for (const auto& v : *it) {
        if (!v.is_string()) {
            throw SchemaError(std::string(what) + ": non-string element in '" + field +
                              "' at line " + std::to_string(line_no));
        }
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::string join_tokens(const std::vector<std::string>& tokens, std::size_t begin,
                        std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

}  // namespace

std::vector<std::string> whitespace_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        } else {
            current.push_back(static_cast<char>(c));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

CorpusStats CorpusStore::ingest(std::istream& input, const std::filesystem::path& dir,
                                int chunk_size) {
    if (chunk_size < 1) throw IngestError("chunk_size must be >= 1");
    std::filesystem::create_directories(dir);

    std::ofstream passages_out(dir / "passages.jsonl", std::ios::binary | std::ios::trunc);
    if (!passages_out) {
        throw IngestError("cannot open " + (dir / "passages.jsonl").string() + " for writing");
    }

    CorpusStats stats;
    std::unordered_set<std::string> seen_docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(input, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            throw IngestError("malformed record at line " + std::to_string(line_no));
        }
        if (!rec.contains("id") || !rec["id"].is_string()) {
            throw IngestError("missing field 'id' at line " + std::to_string(line_no));
        }
        if (!rec.contains("text") || !rec["text"].is_string()) {
            throw IngestError("missing field 'text' at line " + std::to_string(line_no));
        }
        const std::string doc_id = rec["id"].get<std::string>();
        const std::string text = rec["text"].get<std::string>();
        std::string title;
        if (rec.contains("title") && rec["title"].is_string()) {
            title = rec["title"].get<std::string>();
        }
        if (doc_id.empty()) {
            throw IngestError("empty 'id' at line " + std::to_string(line_no));
        }
        if (!seen_docs.insert(doc_id).second) {
            throw IngestError("duplicate raw doc id '" + doc_id + "' at line " +
                              std::to_string(line_no));
        }
        const std::vector<std::string> tokens = whitespace_tokens(text);
        if (tokens.empty()) {
            throw IngestError("empty 'text' at line " + std::to_string(line_no));
        }

        ++stats.num_raw_docs;
        stats.total_tokens += tokens.size();
        const std::size_t n = tokens.size();
        const std::size_t step = static_cast<std::size_t>(chunk_size);
        for (std::size_t begin = 0, offset = 0; begin < n; begin += step, ++offset) {
            const std::size_t end = std::min(begin + step, n);
            json p;
            p["id"] = doc_id + "#" + std::to_string(offset);
            p["title"] = title;
            p["text"] = join_tokens(tokens, begin, end);
            p["source_doc"] = doc_id;
            p["offset"] = offset;
            passages_out << p.dump() << '\n';
            ++stats.num_passages;
        }
    }
    passages_out.flush();
    if (!passages_out) throw IngestError("write failure under " + dir.string());

    json manifest;
    manifest["num_raw_docs"] = stats.num_raw_docs;
    manifest["num_passages"] = stats.num_passages;
    manifest["total_tokens"] = stats.total_tokens;
    manifest["chunk_size"] = chunk_size;
    std::ofstream manifest_out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    manifest_out << manifest.dump(2) << '\n';
    if (!manifest_out) throw IngestError("cannot write manifest under " + dir.string());
    return stats;
}

CorpusStats CorpusStore::ingest_file(const std::filesystem::path& raw_path,
                                     const std::filesystem::path& dir, int chunk_size) {
    std::ifstream in(raw_path, std::ios::binary);
    if (!in) throw IngestError("cannot open raw corpus " + raw_path.string());
    return ingest(in, dir, chunk_size);
}

CorpusStore CorpusStore::open(const std::filesystem::path& dir) {
    std::ifstream manifest_in(dir / "manifest.json", std::ios::binary);
    if (!manifest_in) {
        throw NotFoundError("no corpus store at " + dir.string() + " (missing manifest.json)");
    }
    json manifest = json::parse(manifest_in, nullptr, false);
    if (manifest.is_discarded() || !manifest.is_object()) {
        throw SchemaError("corrupt manifest.json under " + dir.string());
    }

    CorpusStore store;
    store.dir_ = dir;
    store.chunk_size_ = manifest.value("chunk_size", 0);
    store.stats_.num_raw_docs = manifest.value("num_raw_docs", 0ULL);
    store.stats_.num_passages = manifest.value("num_passages", 0ULL);
    store.stats_.total_tokens = manifest.value("total_tokens", 0ULL);

    std::ifstream passages_in(dir / "passages.jsonl", std::ios::binary);
    if (!passages_in) {
        throw NotFoundError("missing passages.jsonl under " + dir.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(passages_in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec = parse_line(line, line_no, "passages.jsonl");
        Passage p;
        p.id = require_string(rec, "id", line_no, "passages.jsonl");
        p.title = require_string(rec, "title", line_no, "passages.jsonl");
        p.text = require_string(rec, "text", line_no, "passages.jsonl");
        p.source_doc = require_string(rec, "source_doc", line_no, "passages.jsonl");
        if (!rec.contains("offset") || !rec["offset"].is_number_integer()) {
            throw SchemaError("passages.jsonl: missing 'offset' at line " +
                              std::to_string(line_no));
        }
        p.offset = rec["offset"].get<int>();
        store.by_id_.emplace(p.id, store.passages_.size());
        store.passages_.push_back(std::move(p));
    }
    return store;
}

const Passage& CorpusStore::get_passage(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw NotFoundError("unknown passage id '" + id + "'");
    return passages_[it->second];
}

bool CorpusStore::has_passage(const std::string& id) const {
    return by_id_.find(id) != by_id_.end();
}

std::vector<QaExample> load_qa_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot open dataset " + path.string());
    std::vector<QaExample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec = parse_line(line, line_no, "qa dataset");
        QaExample ex;
        ex.id = require_string(rec, "id", line_no, "qa dataset");
        ex.question = require_string(rec, "question", line_no, "qa dataset");
        ex.answers = require_string_array(rec, "answers", line_no, "qa dataset");
        if (ex.question.empty()) {
            throw SchemaError("qa dataset: empty question at line " + std::to_string(line_no));
        }
        if (ex.answers.empty()) {
            throw SchemaError("qa dataset: empty answers at line " + std::to_string(line_no));
        }
        out.push_back(std::move(ex));
    }
    return out;
}

std::vector<DialogueExample> load_dialogue_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot open dataset " + path.string());
    std::vector<DialogueExample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec = parse_line(line, line_no, "dialogue dataset");
        DialogueExample ex;
        ex.id = require_string(rec, "id", line_no, "dialogue dataset");
        ex.history = require_string_array(rec, "history", line_no, "dialogue dataset");
        ex.reference = require_string(rec, "reference", line_no, "dialogue dataset");
        if (ex.reference.empty()) {
            throw SchemaError("dialogue dataset: empty reference at line " +
                              std::to_string(line_no));
        }
        out.push_back(std::move(ex));
    }
    return out;
}

std::string to_jsonl_line(const QaExample& ex) {
    json rec;
    rec["id"] = ex.id;
    rec["question"] = ex.question;
    rec["answers"] = ex.answers;
    return rec.dump();
}

std::string to_jsonl_line(const DialogueExample& ex) {
    json rec;
    rec["id"] = ex.id;
    rec["history"] = ex.history;
    rec["reference"] = ex.reference;
    return rec.dump();
}

void save_qa_dataset(const std::filesystem::path& path, const std::vector<QaExample>& examples) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing");
    for (const auto& ex : examples) out << to_jsonl_line(ex) << '\n';
}

void save_dialogue_dataset(const std::filesystem::path& path,
                           const std::vector<DialogueExample>& examples) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing");
    for (const auto& ex : examples) out << to_jsonl_line(ex) << '\n';
}

}  // namespace refeed::corpus
