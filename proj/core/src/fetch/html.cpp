// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/fetch/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>

#include "lyrnet/error.hpp"

namespace lyrnet::fetch {

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':';
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = lower(c);
  return out;
}

constexpr std::array<std::string_view, 14> kVoid = {"area",  "base", "br",   "col",   "embed",  "hr",    "img",
                                                    "input", "link", "meta", "param", "source", "track", "wbr"};
constexpr std::array<std::string_view, 16> kBlock = {"p",  "div", "li", "ul", "ol", "h1",    "h2",    "h3",
                                                     "h4", "h5",  "h6", "tr", "table", "section", "article", "pre"};

bool contains(auto const& set, std::string_view s) { return std::find(set.begin(), set.end(), s) != set.end(); }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  std::unique_ptr<HtmlNode> run() {
    auto root = std::make_unique<HtmlNode>();
    root->tag = "#document";
    HtmlNode* current = root.get();
    while (i_ < s_.size()) {
      if (s_[i_] != '<') {
        const auto next = s_.find('<', i_);
        const auto end = next == std::string_view::npos ? s_.size() : next;
        add_text(current, s_.substr(i_, end - i_));
        i_ = end;
        continue;
      }
      if (s_.substr(i_, 4) == "<!--") {
        const auto end = s_.find("-->", i_ + 4);
        i_ = end == std::string_view::npos ? s_.size() : end + 3;
      } else if (i_ + 1 < s_.size() && (s_[i_ + 1] == '!' || s_[i_ + 1] == '?')) {
        skip_past('>');
      } else if (i_ + 1 < s_.size() && s_[i_ + 1] == '/') {
        i_ += 2;
        const auto name = read_name();
        skip_past('>');
        for (HtmlNode* n = current; n != nullptr && n->parent != nullptr; n = n->parent) {
          if (n->tag == name) {
            current = n->parent;
            break;
          }
        }
      } else if (i_ + 1 < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_ + 1]))) {
        ++i_;
        current = open_tag(current);
      } else {
        add_text(current, "<");
        ++i_;
      }
    }
    return root;
  }

 private:
  void skip_past(char c) {
    const auto end = s_.find(c, i_);
    i_ = end == std::string_view::npos ? s_.size() : end + 1;
  }

  std::string read_name() {
    const auto start = i_;
    while (i_ < s_.size() && is_name_char(s_[i_])) ++i_;
    return to_lower(s_.substr(start, i_ - start));
  }

  void skip_spaces() {
    while (i_ < s_.size() && is_space(s_[i_])) ++i_;
  }

  static void add_text(HtmlNode* parent, std::string_view text) {
    if (text.empty()) return;
    if (!parent->children.empty() && parent->children.back()->is_text) {
      parent->children.back()->text += text;
      return;
    }
    auto node = std::make_unique<HtmlNode>();
    node->is_text = true;
    node->text = std::string(text);
    node->parent = parent;
    parent->children.push_back(std::move(node));
  }

  HtmlNode* open_tag(HtmlNode* current) {
    auto node = std::make_unique<HtmlNode>();
    node->tag = read_name();
    node->parent = current;
    bool self_closing = false;
    while (i_ < s_.size()) {
      skip_spaces();
      if (i_ >= s_.size()) break;
      if (s_[i_] == '>') {
        ++i_;
        break;
      }
      if (s_[i_] == '/') {
        self_closing = true;
        ++i_;
        continue;
      }
      auto name = read_name();
      if (name.empty()) {
        ++i_;  // stray character inside a tag
        continue;
      }
      skip_spaces();
      std::string value;
      if (i_ < s_.size() && s_[i_] == '=') {
        ++i_;
        skip_spaces();
        if (i_ < s_.size() && (s_[i_] == '"' || s_[i_] == '\'')) {
          const char q = s_[i_++];
          const auto end = s_.find(q, i_);
          const auto stop = end == std::string_view::npos ? s_.size() : end;
          value = decode_entities(s_.substr(i_, stop - i_));
          i_ = std::min(s_.size(), stop + 1);
        } else {
          const auto start = i_;
          while (i_ < s_.size() && !is_space(s_[i_]) && s_[i_] != '>') ++i_;
          value = decode_entities(s_.substr(start, i_ - start));
        }
      }
      node->attributes.emplace_back(std::move(name), std::move(value));
    }
    HtmlNode* raw = node.get();
    current->children.push_back(std::move(node));
    if (raw->tag == "script" || raw->tag == "style") {
      const std::string close = "</" + raw->tag;
      std::size_t end = i_;
      while (end < s_.size()) {
        end = s_.find("</", end);
        if (end == std::string_view::npos) break;
        if (to_lower(s_.substr(end, close.size())) == close) break;
        end += 2;
      }
      i_ = end == std::string_view::npos ? s_.size() : end;
      skip_past('>');
      return current;
    }
    if (self_closing || contains(kVoid, raw->tag)) return current;
    return raw;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

struct AttrTest {
  std::string name;
  std::optional<std::string> value;
};

struct Compound {
  std::string tag;
  std::vector<std::string> classes;
  std::optional<std::string> id;
  std::vector<AttrTest> attrs;
};

std::vector<Compound> parse_selector(std::string_view sel) {
  std::vector<Compound> out;
  std::size_t i = 0;
  auto fail = [&](const std::string& why) {
    throw InvalidParameterError("selector '" + std::string(sel) + "': " + why);
  };
  auto read_ident = [&] {
    const auto start = i;
    while (i < sel.size() && is_name_char(sel[i])) ++i;
    if (i == start) fail("expected a name at offset " + std::to_string(start));
    return std::string(sel.substr(start, i - start));
  };
  while (i < sel.size()) {
    while (i < sel.size() && is_space(sel[i])) ++i;
    if (i >= sel.size()) break;
    Compound c;
    bool any = false;
    while (i < sel.size() && !is_space(sel[i])) {
      const char ch = sel[i];
      if (ch == '.') {
        ++i;
        c.classes.push_back(read_ident());
      } else if (ch == '#') {
        ++i;
        c.id = read_ident();
      } else if (ch == '[') {
        ++i;
        AttrTest t{to_lower(read_ident()), std::nullopt};
        if (i < sel.size() && sel[i] == '=') {
          ++i;
          if (i < sel.size() && (sel[i] == '"' || sel[i] == '\'')) {
            const char q = sel[i++];
            const auto end = sel.find(q, i);
            if (end == std::string_view::npos) fail("unterminated quote");
            t.value = std::string(sel.substr(i, end - i));
            i = end + 1;
          } else {
            const auto start = i;
            while (i < sel.size() && sel[i] != ']') ++i;
            t.value = std::string(sel.substr(start, i - start));
          }
        }
        if (i >= sel.size() || sel[i] != ']') fail("expected ']'");
        ++i;
        c.attrs.push_back(std::move(t));
      } else if (is_name_char(ch) && !any) {
        c.tag = to_lower(read_ident());
      } else {
        fail(std::string("unexpected '") + ch + "'");
      }
      any = true;
    }
    out.push_back(std::move(c));
  }
  if (out.empty()) fail("empty selector");
  return out;
}

bool matches(const HtmlNode& n, const Compound& c) {
  if (n.is_text || n.parent == nullptr) return false;
  if (!c.tag.empty() && n.tag != c.tag) return false;
  for (const auto& cls : c.classes) {
    if (!n.has_class(cls)) return false;
  }
  if (c.id && n.attribute("id") != std::optional<std::string_view>(*c.id)) return false;
  for (const auto& a : c.attrs) {
    const auto v = n.attribute(a.name);
    if (!v || (a.value && *v != *a.value)) return false;
  }
  return true;
}

bool matches_chain(const HtmlNode& n, const std::vector<Compound>& chain) {
  if (!matches(n, chain.back())) return false;
  std::size_t k = chain.size() - 1;
  for (const HtmlNode* a = n.parent; a != nullptr && k > 0; a = a->parent) {
    if (matches(*a, chain[k - 1])) --k;
  }
  return k == 0;
}

void collect(const HtmlNode& n, const std::vector<Compound>& chain, std::vector<const HtmlNode*>& out) {
  for (const auto& child : n.children) {
    if (child->is_text) continue;
    if (matches_chain(*child, chain)) {
      out.push_back(child.get());
    } else {
      collect(*child, chain, out);
    }
  }
}

void render(const HtmlNode& n, std::string& out) {
  if (n.is_text) {
    for (char c : decode_entities(n.text)) out += (c == '\n' || c == '\r' || c == '\t') ? ' ' : c;
    return;
  }
  if (n.tag == "br") {
    out += '\n';
    return;
  }
  const bool block = contains(kBlock, n.tag);
  if (block) out += '\n';
  for (const auto& c : n.children) render(*c, out);
  if (block) out += '\n';
}

}  // namespace

std::optional<std::string_view> HtmlNode::attribute(std::string_view name) const {
  for (const auto& [k, v] : attributes) {
    if (k == name) return std::string_view(v);
  }
  return std::nullopt;
}

bool HtmlNode::has_class(std::string_view cls) const {
  const auto v = attribute("class");
  if (!v) return false;
  std::size_t i = 0;
  while (i < v->size()) {
    while (i < v->size() && is_space((*v)[i])) ++i;
    const auto start = i;
    while (i < v->size() && !is_space((*v)[i])) ++i;
    if (v->substr(start, i - start) == cls && i > start) return true;
  }
  return false;
}

HtmlDocument HtmlDocument::parse(std::string_view html) {
  HtmlDocument doc;
  doc.root_ = Parser(html).run();
  return doc;
}

std::vector<const HtmlNode*> HtmlDocument::select(std::string_view selector) const {
  const auto chain = parse_selector(selector);
  std::vector<const HtmlNode*> out;
  collect(*root_, chain, out);
  return out;
}

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '&') {
      out += text[i];
      continue;
    }
    const auto semi = text.find(';', i);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += '&';
      continue;
    }
    const auto body = text.substr(i + 1, semi - i - 1);
    std::optional<std::uint32_t> cp;
    if (body == "amp") {
      cp = '&';
    } else if (body == "lt") {
      cp = '<';
    } else if (body == "gt") {
      cp = '>';
    } else if (body == "quot") {
      cp = '"';
    } else if (body == "apos") {
      cp = '\'';
    } else if (body == "nbsp") {
      cp = ' ';
    } else if (body.size() > 1 && body[0] == '#') {
      std::uint32_t v = 0;
      const bool hex = body[1] == 'x' || body[1] == 'X';
      const auto digits = body.substr(hex ? 2 : 1);
      const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), v, hex ? 16 : 10);
      if (!digits.empty() && res.ec == std::errc() && res.ptr == digits.data() + digits.size()) cp = v;
    }
    if (!cp) {
      out += '&';
      continue;
    }
    append_utf8(out, *cp);
    i = semi;
  }
  return out;
}

std::string normalize_whitespace(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line;
    bool pending_space = false;
    for (char c : text.substr(start, nl - start)) {
      if (is_space(c)) {
        pending_space = !line.empty();
      } else {
        if (pending_space) line += ' ';
        pending_space = false;
        line += c;
      }
    }
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  std::string out;
  bool blank_pending = false;
  for (const auto& line : lines) {
    if (line.empty()) {
      blank_pending = !out.empty();
      continue;
    }
    if (!out.empty()) out += blank_pending ? "\n\n" : "\n";
    blank_pending = false;
    out += line;
  }
  return out;
}

std::string text_content(const HtmlNode& node) {
  std::string raw;
  if (node.is_text) {
    render(node, raw);
  } else {
    for (const auto& c : node.children) render(*c, raw);
  }
  return normalize_whitespace(raw);
}

std::optional<std::string> extract_text(std::string_view html, std::string_view selector) {
  const auto doc = HtmlDocument::parse(html);
  const auto hits = doc.select(selector);
  if (hits.empty()) return std::nullopt;
  std::string raw;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (i) raw += '\n';
    for (const auto& c : hits[i]->children) render(*c, raw);
  }
  return normalize_whitespace(raw);
}

std::vector<std::string> extract_attribute(std::string_view html, std::string_view selector,
                                           std::string_view attribute) {
  const auto doc = HtmlDocument::parse(html);
  std::vector<std::string> out;
  for (const auto* n : doc.select(selector)) {
    if (const auto v = n->attribute(attribute)) out.emplace_back(*v);
  }
  return out;
}

}  // namespace lyrnet::fetch
