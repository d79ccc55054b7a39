#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rosa/core.hpp"
#include "rosa/extract.hpp"
#include "rosa/launch.hpp"

namespace rosa {

enum class ResourceKind { topic, service, parameter };
enum class LinkRole { publisher, subscriber, server, client, param_read, param_write };

const char* to_string(ResourceKind k);
const char* to_string(LinkRole r);
std::optional<LinkRole> parse_link_role(std::string_view s);
ResourceKind resource_kind(LinkRole r);
LinkRole role_for(CallKind k);

struct NodeInstance {
  std::string name;
  std::string package;
  std::string node_type;
  Condition condition;
  std::string provenance = "launch";
  bool has_source = false;

  bool operator==(const NodeInstance&) const = default;
};

struct ChannelResource {
  std::string name;
  ResourceKind kind = ResourceKind::topic;
  Unknowable<std::string> msg_type;
  Condition condition;
  bool unresolved = false;

  bool operator==(const ChannelResource&) const = default;
};

struct ParamResource {
  std::string name;
  Unknowable<std::string> value;
  Condition condition;
  bool unresolved = false;

  bool operator==(const ParamResource&) const = default;
};

struct Link {
  std::string node;
  std::string resource;
  LinkRole role = LinkRole::publisher;
  Unknowable<std::string> msg_type;
  std::optional<Unknowable<std::int64_t>> queue_size;
  bool conditional = false;
  std::string condition_text;
  Provenance provenance = Provenance::source;
  std::optional<SourceLoc> loc;

  bool operator==(const Link&) const = default;
};

struct RosGraph {
  std::string configuration;
  std::vector<NodeInstance> nodes;
  std::vector<ChannelResource> topics;
  std::vector<ChannelResource> services;
  std::vector<ParamResource> parameters;
  std::vector<Link> links;

  const NodeInstance* node(std::string_view name) const;
  const ChannelResource* topic(std::string_view name) const;
  const ChannelResource* service(std::string_view name) const;
  const ParamResource* parameter(std::string_view name) const;

  bool operator==(const RosGraph&) const = default;
};

struct Statistics {
  std::size_t nodes = 0;
  std::size_t topics = 0;
  std::size_t services = 0;
  std::size_t parameters = 0;
  std::size_t links = 0;
  std::size_t conditional_links = 0;
  std::size_t conditional_entities = 0;
  std::size_t unresolved_entities = 0;

  bool operator==(const Statistics&) const = default;
};

/// Extractions keyed by "package/node_type".
using ExtractionMap = std::map<std::string, NodeExtraction>;

/// Instantiates every launched node's extraction, fusing hints per node
/// instance, and merges resources by resolved global name.
RosGraph build_graph(const std::string& configuration, const LaunchInterpretation& launch,
                     const ExtractionMap& extractions, const HintSet& hints, IssueList& issues);

Statistics graph_statistics(const RosGraph& g);

/// Throws ValidationError on a dangling link endpoint or duplicate name.
void check_integrity(const RosGraph& g);

}  // namespace rosa
