// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lyrnet::fetch {

/// Element or text node of a leniently parsed HTML document.
struct HtmlNode {
  bool is_text = false;
  std::string text;  // raw (undecoded) text for text nodes
  std::string tag;   // lowercase
  std::vector<std::pair<std::string, std::string>> attributes;  // names lowercase, values decoded
  std::vector<std::unique_ptr<HtmlNode>> children;
  HtmlNode* parent = nullptr;

  std::optional<std::string_view> attribute(std::string_view name) const;
  bool has_class(std::string_view cls) const;
};

/// Tolerant parser: unknown or unbalanced tags never fail, script/style
/// bodies and comments are skipped.
class HtmlDocument {
 public:
  static HtmlDocument parse(std::string_view html);

  const HtmlNode& root() const { return *root_; }

  /// Elements matching a descendant selector chain of compounds built from
  /// `tag`, `.class`, `#id`, `[attr]` and `[attr=value]`, in document order.
  /// Matches nested inside an earlier match are skipped. Throws
  /// InvalidParameterError on a malformed selector.
  std::vector<const HtmlNode*> select(std::string_view selector) const;

 private:
  std::unique_ptr<HtmlNode> root_;
};

/// Decodes named (amp, lt, gt, quot, apos, nbsp) and numeric entities.
std::string decode_entities(std::string_view text);

/// Collapses runs of spaces within lines, trims lines, keeps at most one blank
/// line between paragraphs and drops leading/trailing blank lines.
std::string normalize_whitespace(std::string_view text);

/// Visible text of an element: <br> and block boundaries become newlines,
/// entities decoded, whitespace normalized.
std::string text_content(const HtmlNode& node);

/// Joined text of every match, or nullopt when the selector matches nothing.
std::optional<std::string> extract_text(std::string_view html, std::string_view selector);

/// Values of `attribute` on every matching element that has it.
std::vector<std::string> extract_attribute(std::string_view html, std::string_view selector,
                                           std::string_view attribute);

}  // namespace lyrnet::fetch
