// Copyright 2026 The Mathlink Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mathlink/corpus.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "mathlink/errors.h"
#include "mathlink/utf8.h"

namespace mathlink {
namespace {

using json = nlohmann::json;

std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Error context for one record.
struct RecordContext {
  std::string source;
  int line;   // 1-based, 0 when unknown
  int index;  // record index

  [[noreturn]] void Fail(const std::string &field, const std::string &what) const {
    std::ostringstream msg;
    msg << source;
    if (line > 0) msg << ":" << line;
    msg << ": record " << index << ": field '" << field << "' " << what;
    throw FormatError(msg.str());
  }
};

const json &Require(const json &obj, const char *key, const std::string &path,
                    const RecordContext &ctx) {
  if (!obj.is_object()) ctx.Fail(path, "is not an object");
  auto it = obj.find(key);
  if (it == obj.end()) ctx.Fail(path.empty() ? key : path + "." + key, "is missing");
  return *it;
}

std::string RequireString(const json &obj, const char *key, const std::string &path,
                          const RecordContext &ctx) {
  const json &v = Require(obj, key, path, ctx);
  if (!v.is_string()) ctx.Fail(path.empty() ? key : path + "." + key, "is not a string");
  return v.get<std::string>();
}

int RequireInt(const json &obj, const char *key, const std::string &path,
               const RecordContext &ctx) {
  const json &v = Require(obj, key, path, ctx);
  if (!v.is_number_integer()) {
    ctx.Fail(path.empty() ? key : path + "." + key, "is not an integer");
  }
  return v.get<int>();
}

RawDocument ParseRecord(const json &record, const RecordContext &ctx) {
  RawDocument doc;
  doc.id = RequireString(record, "id", "", ctx);
  doc.domain = ParseDomain(RequireString(record, "domain", "", ctx));
  doc.text = RequireString(record, "text", "", ctx);

  const json &entities = Require(record, "entities", "", ctx);
  if (!entities.is_array()) ctx.Fail("entities", "is not an array");
  for (size_t i = 0; i < entities.size(); ++i) {
    const std::string path = "entities[" + std::to_string(i) + "]";
    const json &e = entities[i];
    EntityAnnotation entity;
    entity.id = RequireString(e, "id", path, ctx);
    const std::string type = RequireString(e, "type", path, ctx);
    auto parsed = ParseEntityType(type);
    if (!parsed) ctx.Fail(path + ".type", "has unknown entity type \"" + type + "\"");
    entity.type = *parsed;
    entity.span.start = RequireInt(e, "start", path, ctx);
    entity.span.end = RequireInt(e, "end", path, ctx);
    doc.entities.push_back(std::move(entity));
  }

  const json &relations = Require(record, "relations", "", ctx);
  if (!relations.is_array()) ctx.Fail("relations", "is not an array");
  for (size_t i = 0; i < relations.size(); ++i) {
    const std::string path = "relations[" + std::to_string(i) + "]";
    const json &r = relations[i];
    RelationAnnotation relation;
    const std::string type = RequireString(r, "type", path, ctx);
    auto parsed = ParseRelationType(type);
    if (!parsed) ctx.Fail(path + ".type", "has unknown relation type \"" + type + "\"");
    relation.type = *parsed;
    relation.head = RequireString(r, "head", path, ctx);
    relation.tail = RequireString(r, "tail", path, ctx);
    doc.relations.push_back(std::move(relation));
  }
  return doc;
}

json ToJson(const RawDocument &doc) {
  json entities = json::array();
  for (const auto &e : doc.entities) {
    entities.push_back({{"id", e.id},
                        {"type", EntityTypeName(e.type)},
                        {"start", e.span.start},
                        {"end", e.span.end}});
  }
  json relations = json::array();
  for (const auto &r : doc.relations) {
    relations.push_back(
        {{"type", RelationTypeName(r.type)}, {"head", r.head}, {"tail", r.tail}});
  }
  return {{"id", doc.id},
          {"domain", DomainName(doc.domain)},
          {"text", doc.text},
          {"entities", std::move(entities)},
          {"relations", std::move(relations)}};
}

}  // namespace

int RawDocument::FindEntity(std::string_view entity_id) const {
  for (size_t i = 0; i < entities.size(); ++i) {
    if (entities[i].id == entity_id) return static_cast<int>(i);
  }
  return -1;
}

void ValidateDocument(const RawDocument &doc) {
  const int length = CodePointLength(doc.text);
  std::unordered_set<std::string> ids;
  for (const auto &e : doc.entities) {
    if (!ids.insert(e.id).second) {
      throw ValidationError("document " + doc.id + ": duplicate entity id \"" + e.id + "\"");
    }
    if (e.span.start < 0 || e.span.start >= e.span.end || e.span.end > length) {
      throw ValidationError("document " + doc.id + ": entity \"" + e.id + "\" span [" +
                            std::to_string(e.span.start) + "," +
                            std::to_string(e.span.end) + ") outside text of length " +
                            std::to_string(length));
    }
  }
  for (const auto &r : doc.relations) {
    for (const std::string *endpoint : {&r.head, &r.tail}) {
      if (!ids.count(*endpoint)) {
        throw ValidationError("document " + doc.id + ": relation references unknown entity \"" +
                              *endpoint + "\"");
      }
    }
    if (r.head == r.tail) {
      throw ValidationError("document " + doc.id + ": relation links entity \"" + r.head +
                            "\" to itself");
    }
  }
}

std::vector<RawDocument> ParseCorpus(std::string_view content, std::string_view source) {
  std::vector<RawDocument> docs;
  const std::string src(source);
  auto first = content.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return docs;

  if (content[first] == '[') {
    json array;
    try {
      array = json::parse(content);
    } catch (const json::parse_error &e) {
      throw FormatError(src + ": " + e.what());
    }
    for (size_t i = 0; i < array.size(); ++i) {
      docs.push_back(ParseRecord(array[i], {src, 0, static_cast<int>(i)}));
    }
  } else {
    int line_number = 0;
    size_t pos = 0;
    while (pos <= content.size()) {
      size_t next = content.find('\n', pos);
      if (next == std::string_view::npos) next = content.size();
      std::string_view line = content.substr(pos, next - pos);
      ++line_number;
      pos = next + 1;
      if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
      json record;
      try {
        record = json::parse(line);
      } catch (const json::parse_error &e) {
        throw FormatError(src + ":" + std::to_string(line_number) + ": " + e.what());
      }
      docs.push_back(
          ParseRecord(record, {src, line_number, static_cast<int>(docs.size())}));
    }
  }

  std::set<std::string> doc_ids;
  for (const auto &doc : docs) {
    ValidateDocument(doc);
    if (!doc_ids.insert(doc.id).second) {
      throw ValidationError(src + ": duplicate document id \"" + doc.id + "\"");
    }
  }
  return docs;
}

std::vector<RawDocument> LoadCorpus(const std::filesystem::path &path) {
  return ParseCorpus(ReadFile(path), path.string());
}

std::string SerializeCorpus(const std::vector<RawDocument> &docs) {
  std::string out;
  for (const auto &doc : docs) {
    out += ToJson(doc).dump();
    out += '\n';
  }
  return out;
}

void SaveCorpus(const std::vector<RawDocument> &docs, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << SerializeCorpus(docs);
}

RawDocument LoadBratDocument(const std::filesystem::path &txt_path,
                             const std::filesystem::path &ann_path, Domain domain) {
  RawDocument doc;
  doc.id = txt_path.stem().string();
  doc.domain = domain;
  doc.text = ReadFile(txt_path);

  std::istringstream ann(ReadFile(ann_path));
  std::string line;
  int line_number = 0;
  auto fail = [&](const std::string &what) {
    throw FormatError(ann_path.string() + ":" + std::to_string(line_number) + ": " + what);
  };
  while (std::getline(ann, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab1 = line.find('\t');
    if (tab1 == std::string::npos) fail("missing tab separator");
    const std::string key = line.substr(0, tab1);
    const auto tab2 = line.find('\t', tab1 + 1);
    const std::string body = line.substr(tab1 + 1, tab2 == std::string::npos
                                                        ? std::string::npos
                                                        : tab2 - tab1 - 1);
    std::istringstream fields(body);
    std::string label;
    fields >> label;
    if (key[0] == 'T') {
      auto type = ParseEntityType(label);
      if (!type) fail("unknown entity type \"" + label + "\"");
      std::string rest;
      std::getline(fields, rest);
      // "start end" or "s1 e1;s2 e2"
      int lo = -1, hi = -1;
      std::istringstream ranges(rest);
      std::string fragment;
      while (std::getline(ranges, fragment, ';')) {
        std::istringstream nums(fragment);
        int s, e;
        if (!(nums >> s >> e)) fail("bad offsets \"" + rest + "\"");
        lo = lo < 0 ? s : std::min(lo, s);
        hi = std::max(hi, e);
      }
      if (lo < 0) fail("missing offsets");
      doc.entities.push_back({key, *type, {lo, hi}});
    } else if (key[0] == 'R') {
      auto type = ParseRelationType(label);
      if (!type) fail("unknown relation type \"" + label + "\"");
      std::string arg1, arg2;
      fields >> arg1 >> arg2;
      auto strip = [&](const std::string &arg, const char *prefix) {
        const std::string p(prefix);
        if (arg.rfind(p, 0) != 0) fail("expected " + p + " argument");
        return arg.substr(p.size());
      };
      doc.relations.push_back({*type, strip(arg1, "Arg1:"), strip(arg2, "Arg2:")});
    }
    // Other annotation kinds (attributes, notes) carry nothing we use.
  }
  ValidateDocument(doc);
  return doc;
}

std::vector<RawDocument> LoadBratDirectory(const std::filesystem::path &dir, Domain domain) {
  std::vector<std::filesystem::path> stems;
  for (const auto &entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".txt") stems.push_back(entry.path());
  }
  std::sort(stems.begin(), stems.end());
  std::vector<RawDocument> docs;
  for (const auto &txt : stems) {
    auto ann = txt;
    ann.replace_extension(".ann");
    if (!std::filesystem::exists(ann)) continue;
    docs.push_back(LoadBratDocument(txt, ann, domain));
  }
  return docs;
}

}  // namespace mathlink
