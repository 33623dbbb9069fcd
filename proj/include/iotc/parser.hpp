// iotc/parser.hpp - parsers and canonical formatter for the spec languages
//
// The committed grammar lives in docs/grammar.md. Each parser is a pure
// function over one file: it returns either the section (possibly with
// warnings) or at least one error, never both.
#pragma once

#include <string>
#include <string_view>

#include "iotc/diagnostics.hpp"
#include "iotc/model.hpp"

namespace iotc
{

Result<VocabSection> parse_vocab(std::string_view source, std::string_view file = "vocab.spec");
Result<ArchSection> parse_arch(std::string_view source, std::string_view file = "arch.spec");
Result<UiSection> parse_ui(std::string_view source, std::string_view file = "ui.spec");
Result<DeploySection> parse_deploy(std::string_view source, std::string_view file = "deploy.spec",
                                   const LabelAllowList & labels = {});

// Canonical pretty-printing. parse_x(format(s)) == s for every section s
// returned by parse_x.
std::string format(const VocabSection & s);
std::string format(const ArchSection & s);
std::string format(const UiSection & s);
std::string format(const DeploySection & s);

/// Shortest fixed-notation text that reads back to the same double.
std::string format_number(double value);

}  // namespace iotc
