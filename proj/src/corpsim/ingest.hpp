#ifndef CORPSIM_INGEST_HPP
#define CORPSIM_INGEST_HPP

#include <functional>
#include <string>

#include "corpsim/types.hpp"

namespace corpsim {

enum class CorpusFormat { Jsonl, Tree };

CorpusFormat corpus_format_from_string(std::string_view s);
const char *to_string(CorpusFormat f);

// Streams documents in deterministic order: files lexicographic, lines as
// stored. jsonl accepts a file or a directory of *.jsonl files; tree expects
// {language}/{country}/{register}/*.txt with one document per line.
// Malformed input raises an error carrying file and line number.
void read_corpus(const std::string &path, CorpusFormat format,
                 const std::function<void(RawDocument &&)> &sink);

// Packs each cell's token stream into samples of exactly sample_size
// tokens, writing one token file per retained sample under
// <workspace>/samples/<cell>/<index>.txt (one space-joined document
// fragment per line). The remainder and anything past the first `cap`
// samples are discarded but accounted for in CellStats.
SampleManifest chunk_into_samples(const std::string &corpus_path,
                                  CorpusFormat format,
                                  const std::string &workspace,
                                  uint64_t sample_size, uint32_t cap);

// Token file access for the counting stage. Returns one token vector per
// stored document fragment.
std::vector<std::vector<std::string>> load_sample_tokens(
    const std::string &path);

std::string manifest_to_json(const SampleManifest &manifest);
SampleManifest manifest_from_json(const std::string &json_text,
                                  const std::string &origin);
void save_manifest(const std::string &path, const SampleManifest &manifest);
SampleManifest load_manifest(const std::string &path);

}  // namespace corpsim

#endif
