#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace topicaudit {

enum class Label { Toxic, Normal, Unlabeled };
enum class Split { Train, Dev, Test, None };

std::string to_string(Label l);
std::string to_string(Split s);
Label label_from_string(const std::string& s);
Split split_from_string(const std::string& s);

struct Document {
    std::string id;
    std::string text;            // preserved byte-exactly from the input
    Label label = Label::Unlabeled;
    std::string original_label;  // source dataset's class name
    std::string source;          // dataset tag, e.g. "wiki"
    Split split = Split::None;
};

struct Corpus {
    std::vector<Document> documents;  // ingestion order, stable
    std::string name;

    std::size_t size() const { return documents.size(); }

    // Count of each original_label, derived from documents.
    std::map<std::string, std::size_t> label_counts() const;

    // Count of each binary label.
    std::map<Label, std::size_t> binary_counts() const;

    // SHA-256 of the canonical serialization; used in provenance records.
    std::string content_hash() const;
};

// original_label -> binary decision. Must cover every label in a corpus
// before binarize_labels accepts it.
enum class MapTarget { Toxic, Normal, Drop };

struct LabelMapping {
    std::map<std::string, MapTarget> entries;

    static LabelMapping load(const std::string& path);
    void save(const std::string& path) const;
};

enum class TabularFormat { Csv, Tsv, Jsonl };

TabularFormat format_from_string(const std::string& s);

// Column (csv/tsv) or field (jsonl) names for ingestion. Empty id/split
// names mean "absent": ids are synthesized as "<name>:<row-index>".
struct IngestSchema {
    std::string id;
    std::string text = "text";
    std::string label = "label";
    std::string split;
};

// RFC 4180 rows of a CSV string with the 1-based line each row starts on;
// quoted fields may contain commas, quotes, and newlines. Exposed for
// small auxiliary tables (predictions, lexicons with metadata).
std::vector<std::pair<std::vector<std::string>, std::size_t>> parse_csv_rows(
    const std::string& content);

// Read a labeled dataset in a common tabular format. The raw class name
// lands in original_label; the binary label stays Unlabeled until
// binarize_labels. Malformed rows fail with their line number.
Corpus load_corpus(const std::string& path, TabularFormat format, const IngestSchema& schema,
                   const std::string& name, const std::string& source = "");

// Canonical working format: JSONL with fields
// {id, text, label, original_label, source, split}.
Corpus load_canonical(const std::string& path, const std::string& name = "");
void save_canonical(const Corpus& corpus, const std::string& path);
std::string canonical_string(const Corpus& corpus);

// Apply a label mapping: Drop removes the document, the rest get a binary
// label. Rejects a mapping that misses any original_label in the corpus.
Corpus binarize_labels(const Corpus& corpus, const LabelMapping& mapping);

// Concatenate corpora in argument order; ids are prefixed with each
// document's source tag (or corpus name when the source is empty) so the
// merged ids stay unique.
Corpus merge_corpora(const std::vector<Corpus>& corpora, const std::string& name);

}  // namespace topicaudit
