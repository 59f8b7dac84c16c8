#include "topicaudit/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "topicaudit/error.hpp"
#include "topicaudit/sha256.hpp"

using nlohmann::json;

namespace topicaudit {

std::string to_string(Label l) {
    switch (l) {
        case Label::Toxic: return "toxic";
        case Label::Normal: return "normal";
        case Label::Unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

std::string to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Dev: return "dev";
        case Split::Test: return "test";
        case Split::None: return "none";
    }
    return "none";
}

Label label_from_string(const std::string& s) {
    if (s == "toxic") return Label::Toxic;
    if (s == "normal") return Label::Normal;
    if (s == "unlabeled" || s.empty()) return Label::Unlabeled;
    throw DataError("unknown label '" + s + "' (expected toxic|normal|unlabeled)");
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "dev") return Split::Dev;
    if (s == "test") return Split::Test;
    if (s == "none" || s.empty()) return Split::None;
    throw DataError("unknown split '" + s + "' (expected train|dev|test|none)");
}

std::map<std::string, std::size_t> Corpus::label_counts() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& d : documents) ++counts[d.original_label];
    return counts;
}

std::map<Label, std::size_t> Corpus::binary_counts() const {
    std::map<Label, std::size_t> counts;
    for (const auto& d : documents) ++counts[d.label];
    return counts;
}

std::string Corpus::content_hash() const {
    return sha256_hex(canonical_string(*this));
}

LabelMapping LabelMapping::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open label mapping: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("invalid label mapping " + path + ": " + e.what());
    }
    if (!j.is_object()) throw DataError("label mapping must be a JSON object: " + path);
    LabelMapping m;
    for (auto& [key, val] : j.items()) {
        if (!val.is_string())
            throw DataError("label mapping value for '" + key + "' must be a string");
        std::string v = val.get<std::string>();
        if (v == "toxic") m.entries[key] = MapTarget::Toxic;
        else if (v == "normal") m.entries[key] = MapTarget::Normal;
        else if (v == "drop") m.entries[key] = MapTarget::Drop;
        else throw DataError("label mapping value for '" + key + "' must be toxic|normal|drop, got '" + v + "'");
    }
    return m;
}

void LabelMapping::save(const std::string& path) const {
    json j = json::object();
    for (const auto& [key, target] : entries) {
        switch (target) {
            case MapTarget::Toxic: j[key] = "toxic"; break;
            case MapTarget::Normal: j[key] = "normal"; break;
            case MapTarget::Drop: j[key] = "drop"; break;
        }
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot write label mapping: " + path);
    out << j.dump(2) << "\n";
}

TabularFormat format_from_string(const std::string& s) {
    if (s == "csv") return TabularFormat::Csv;
    if (s == "tsv") return TabularFormat::Tsv;
    if (s == "jsonl") return TabularFormat::Jsonl;
    throw DataError("unknown format '" + s + "' (expected csv|tsv|jsonl)");
}

namespace {

// RFC 4180 parser over the whole file; quoted fields may contain commas,
// quotes, and newlines. Returns one record per row and the 1-based line
// number the row started on.
std::vector<std::pair<std::vector<std::string>, std::size_t>> parse_csv(const std::string& content) {
    std::vector<std::pair<std::vector<std::string>, std::size_t>> rows;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    std::size_t row_line = 1;
    auto end_field = [&] {
        fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.emplace_back(std::move(fields), row_line);
        fields.clear();
        row_line = line;
    };
    for (std::size_t i = 0; i < content.size(); ++i) {
        char c = content[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') {
            ++i;
            ++line;
            end_row();
        } else if (c == '\n') {
            ++line;
            end_row();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw DataError("unterminated quoted field starting near line " + std::to_string(row_line));
    if (field_started || !fields.empty()) end_row();
    return rows;
}

std::vector<std::pair<std::vector<std::string>, std::size_t>> parse_tsv(const std::string& content) {
    std::vector<std::pair<std::vector<std::string>, std::size_t>> rows;
    std::size_t line = 1;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        std::string_view row_view;
        if (eol == std::string::npos) {
            row_view = std::string_view(content).substr(pos);
            pos = content.size();
        } else {
            row_view = std::string_view(content).substr(pos, eol - pos);
            pos = eol + 1;
        }
        if (!row_view.empty() && row_view.back() == '\r') row_view.remove_suffix(1);
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            std::size_t tab = row_view.find('\t', start);
            if (tab == std::string_view::npos) {
                fields.emplace_back(row_view.substr(start));
                break;
            }
            fields.emplace_back(row_view.substr(start, tab - start));
            start = tab + 1;
        }
        rows.emplace_back(std::move(fields), line);
        ++line;
    }
    return rows;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Corpus ingest_delimited(const std::string& path, TabularFormat format, const IngestSchema& schema,
                        const std::string& name, const std::string& source) {
    std::string content = read_file(path);
    auto rows = format == TabularFormat::Csv ? parse_csv(content) : parse_tsv(content);
    if (rows.empty()) throw DataError(path + ": no header row");

    const auto& header = rows[0].first;
    auto column_of = [&](const std::string& col, bool required) -> std::optional<std::size_t> {
        if (col.empty()) return std::nullopt;
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == col) return i;
        if (required) throw DataError(path + ": column '" + col + "' not found in header");
        return std::nullopt;
    };
    auto id_col = column_of(schema.id, true);
    auto text_col = column_of(schema.text, true);
    auto label_col = column_of(schema.label, true);
    auto split_col = column_of(schema.split, true);
    if (!text_col) throw DataError(path + ": a text column name is required");

    Corpus corpus;
    corpus.name = name;
    corpus.documents.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& [fields, line] = rows[r];
        if (fields.size() != header.size())
            throw DataError(path + ": line " + std::to_string(line) + ": expected " +
                            std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        Document d;
        d.id = id_col ? fields[*id_col] : name + ":" + std::to_string(r - 1);
        if (d.id.empty()) d.id = name + ":" + std::to_string(r - 1);
        d.text = fields[*text_col];
        if (label_col) d.original_label = fields[*label_col];
        if (split_col) d.split = split_from_string(fields[*split_col]);
        d.source = source;
        corpus.documents.push_back(std::move(d));
    }
    return corpus;
}

Corpus ingest_jsonl(const std::string& path, const IngestSchema& schema, const std::string& name,
                    const std::string& source) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    Corpus corpus;
    corpus.name = name;
    std::string raw;
    std::size_t line = 0;
    std::size_t row = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty()) continue;
        json j;
        try {
            j = json::parse(raw);
        } catch (const json::exception& e) {
            throw DataError(path + ": line " + std::to_string(line) + ": " + e.what());
        }
        if (!j.is_object())
            throw DataError(path + ": line " + std::to_string(line) + ": expected a JSON object");
        auto get_string = [&](const std::string& key, bool required) -> std::string {
            if (key.empty() || !j.contains(key)) {
                if (required)
                    throw DataError(path + ": line " + std::to_string(line) + ": missing field '" + key + "'");
                return "";
            }
            const auto& v = j.at(key);
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number_integer()) return std::to_string(v.get<long long>());
            throw DataError(path + ": line " + std::to_string(line) + ": field '" + key + "' must be a string");
        };
        Document d;
        d.text = get_string(schema.text, true);
        d.id = schema.id.empty() ? "" : get_string(schema.id, false);
        if (d.id.empty()) d.id = name + ":" + std::to_string(row);
        if (!schema.label.empty()) d.original_label = get_string(schema.label, false);
        if (!schema.split.empty()) d.split = split_from_string(get_string(schema.split, false));
        d.source = source;
        corpus.documents.push_back(std::move(d));
        ++row;
    }
    return corpus;
}

void check_unique_ids(const Corpus& corpus) {
    std::set<std::string> seen;
    for (const auto& d : corpus.documents) {
        if (!seen.insert(d.id).second)
            throw DataError("corpus '" + corpus.name + "': duplicate document id '" + d.id + "'");
    }
}

}  // namespace

std::vector<std::pair<std::vector<std::string>, std::size_t>> parse_csv_rows(
    const std::string& content) {
    return parse_csv(content);
}

Corpus load_corpus(const std::string& path, TabularFormat format, const IngestSchema& schema,
                   const std::string& name, const std::string& source) {
    Corpus corpus = format == TabularFormat::Jsonl
                        ? ingest_jsonl(path, schema, name, source)
                        : ingest_delimited(path, format, schema, name, source);
    check_unique_ids(corpus);
    return corpus;
}

Corpus load_canonical(const std::string& path, const std::string& name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus: " + path);
    Corpus corpus;
    corpus.name = name.empty() ? path : name;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty()) continue;
        json j;
        try {
            j = json::parse(raw);
        } catch (const json::exception& e) {
            throw DataError(path + ": line " + std::to_string(line) + ": " + e.what());
        }
        try {
            Document d;
            d.id = j.at("id").get<std::string>();
            d.text = j.at("text").get<std::string>();
            d.label = label_from_string(j.value("label", "unlabeled"));
            d.original_label = j.value("original_label", "");
            d.source = j.value("source", "");
            d.split = split_from_string(j.value("split", "none"));
            corpus.documents.push_back(std::move(d));
        } catch (const json::exception& e) {
            throw DataError(path + ": line " + std::to_string(line) + ": " + e.what());
        }
    }
    check_unique_ids(corpus);
    return corpus;
}

std::string canonical_string(const Corpus& corpus) {
    std::string out;
    for (const auto& d : corpus.documents) {
        json j;
        j["id"] = d.id;
        j["text"] = d.text;
        j["label"] = to_string(d.label);
        j["original_label"] = d.original_label;
        j["source"] = d.source;
        j["split"] = to_string(d.split);
        out += j.dump();
        out += '\n';
    }
    return out;
}

void save_canonical(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write corpus: " + path);
    out << canonical_string(corpus);
    if (!out) throw DataError("write failed: " + path);
}

Corpus binarize_labels(const Corpus& corpus, const LabelMapping& mapping) {
    std::set<std::string> uncovered;
    for (const auto& d : corpus.documents)
        if (!mapping.entries.count(d.original_label)) uncovered.insert(d.original_label);
    if (!uncovered.empty()) {
        std::string msg = "label mapping does not cover:";
        for (const auto& l : uncovered) msg += " '" + l + "'";
        throw DataError(msg);
    }
    Corpus out;
    out.name = corpus.name;
    for (const auto& d : corpus.documents) {
        switch (mapping.entries.at(d.original_label)) {
            case MapTarget::Drop:
                break;
            case MapTarget::Toxic: {
                Document c = d;
                c.label = Label::Toxic;
                out.documents.push_back(std::move(c));
                break;
            }
            case MapTarget::Normal: {
                Document c = d;
                c.label = Label::Normal;
                out.documents.push_back(std::move(c));
                break;
            }
        }
    }
    return out;
}

Corpus merge_corpora(const std::vector<Corpus>& corpora, const std::string& name) {
    Corpus out;
    out.name = name;
    for (const auto& c : corpora) {
        for (const auto& d : c.documents) {
            Document m = d;
            const std::string& prefix = d.source.empty() ? c.name : d.source;
            m.id = prefix + ":" + d.id;
            out.documents.push_back(std::move(m));
        }
    }
    check_unique_ids(out);
    return out;
}

}  // namespace topicaudit
