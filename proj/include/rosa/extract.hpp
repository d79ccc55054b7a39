#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rosa/core.hpp"
#include "rosa/msg.hpp"
#include "rosa/project.hpp"
#include "rosa/workspace.hpp"

namespace rosa {

enum class CallKind { advertise, subscribe, service_server, service_client, param_read, param_write };
enum class Provenance { source, hint };

const char* to_string(CallKind k);
const char* to_string(Provenance p);

/// One client-library call site (or hint) that creates a runtime resource.
struct ExtractedCall {
  CallKind kind = CallKind::advertise;
  Unknowable<std::string> name;  // as written; "~x" for private names
  Unknowable<std::string> type;  // "pkg/Type"; known-empty for parameters
  std::optional<Unknowable<std::int64_t>> queue_size;
  bool conditional = false;
  std::string condition_text;  // empty when not a single-line expression
  std::optional<SourceLoc> loc;
  Provenance provenance = Provenance::source;

  bool operator==(const ExtractedCall&) const = default;
};

struct NodeExtraction {
  NodeTarget target;
  std::vector<ExtractedCall> calls;  // ordered by (file, line)
  std::optional<std::string> uses_private_handle_ns;

  bool operator==(const NodeExtraction&) const = default;
};

/// Pattern-level extraction of topic/service/parameter usage. Never runs the
/// analysed code. Unreadable files become issues.
NodeExtraction extract_node(const NodeTarget& target, const MsgIndex& msgs, IssueList& issues);

/// Merges user hints for `node_name` into an extraction. Hints fill unknown
/// fields of a matching call or add new calls; they never remove facts.
NodeExtraction fuse_hints(NodeExtraction extraction, const HintSet& hints, const std::string& node_name,
                          IssueList& issues);

}  // namespace rosa
