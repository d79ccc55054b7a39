#include "rosa/graph.hpp"

#include <algorithm>
#include <set>

namespace rosa {

const char* to_string(ResourceKind k) {
  switch (k) {
    case ResourceKind::topic: return "topic";
    case ResourceKind::service: return "service";
    case ResourceKind::parameter: return "parameter";
  }
  return "topic";
}

const char* to_string(LinkRole r) {
  switch (r) {
    case LinkRole::publisher: return "publisher";
    case LinkRole::subscriber: return "subscriber";
    case LinkRole::server: return "server";
    case LinkRole::client: return "client";
    case LinkRole::param_read: return "param_read";
    case LinkRole::param_write: return "param_write";
  }
  return "publisher";
}

std::optional<LinkRole> parse_link_role(std::string_view s) {
  for (LinkRole r : {LinkRole::publisher, LinkRole::subscriber, LinkRole::server, LinkRole::client,
                     LinkRole::param_read, LinkRole::param_write}) {
    if (s == to_string(r)) return r;
  }
  return std::nullopt;
}

ResourceKind resource_kind(LinkRole r) {
  switch (r) {
    case LinkRole::publisher:
    case LinkRole::subscriber: return ResourceKind::topic;
    case LinkRole::server:
    case LinkRole::client: return ResourceKind::service;
    default: return ResourceKind::parameter;
  }
}

LinkRole role_for(CallKind k) {
  switch (k) {
    case CallKind::advertise: return LinkRole::publisher;
    case CallKind::subscribe: return LinkRole::subscriber;
    case CallKind::service_server: return LinkRole::server;
    case CallKind::service_client: return LinkRole::client;
    case CallKind::param_read: return LinkRole::param_read;
    case CallKind::param_write: return LinkRole::param_write;
  }
  return LinkRole::publisher;
}

namespace {

template <typename T>
const T* find_named(const std::vector<T>& items, std::string_view name) {
  auto it = std::lower_bound(items.begin(), items.end(), name,
                             [](const T& item, std::string_view n) { return item.name < n; });
  if (it != items.end() && it->name == name) return &*it;
  for (const auto& item : items) {
    if (item.name == name) return &item;
  }
  return nullptr;
}

// Resource existence: a resource exists whenever any creating link exists, so
// it is conditional only when every link is.
struct ResourceAcc {
  ResourceKind kind;
  bool unresolved = false;
  bool any_unconditional = false;
  std::vector<std::string> conditions{};
  std::vector<std::string> known_types{};
  std::optional<SourceLoc> loc{};
};

void add_condition(std::vector<std::string>& conds, const std::string& text) {
  const std::string t = text.empty() ? "<conditional>" : text;
  if (std::find(conds.begin(), conds.end(), t) == conds.end()) conds.push_back(t);
}

Condition merged_condition(const ResourceAcc& acc) {
  if (acc.any_unconditional || acc.conditions.empty()) return Condition::always();
  std::string text;
  for (const auto& c : acc.conditions) {
    if (!text.empty()) text += " or ";
    text += c;
  }
  return Condition::expr(text, acc.loc.value_or(SourceLoc{}));
}

std::string join_condition(const std::string& a, const std::string& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return a + " and " + b;
}

}  // namespace

const NodeInstance* RosGraph::node(std::string_view name) const { return find_named(nodes, name); }
const ChannelResource* RosGraph::topic(std::string_view name) const { return find_named(topics, name); }
const ChannelResource* RosGraph::service(std::string_view name) const { return find_named(services, name); }
const ParamResource* RosGraph::parameter(std::string_view name) const { return find_named(parameters, name); }

RosGraph build_graph(const std::string& configuration, const LaunchInterpretation& launch,
                     const ExtractionMap& extractions, const HintSet& hints, IssueList& issues) {
  RosGraph g;
  g.configuration = configuration;

  using LinkKey = std::tuple<std::string, std::string, LinkRole>;
  std::map<LinkKey, Link> links;
  std::map<std::pair<ResourceKind, std::string>, ResourceAcc> resources;
  std::map<std::string, ParamResource> params;

  for (const auto& launched : launch.nodes) {
    if (std::any_of(g.nodes.begin(), g.nodes.end(), [&](const NodeInstance& n) { return n.name == launched.name; })) {
      issues.push_back(make_issue(Severity::error, Category::model, "duplicate-node", EntityScope{launched.name},
                                  "node name " + launched.name + " is launched more than once"));
      continue;
    }
    NodeInstance inst{launched.name, launched.package, launched.node_type, launched.condition, "launch", false};
    NodeExtraction extraction;
    auto it = extractions.find(launched.package + "/" + launched.node_type);
    if (it != extractions.end()) {
      extraction = it->second;
      inst.has_source = true;
    } else {
      issues.push_back(make_issue(Severity::warning, Category::model, "no-source", EntityScope{launched.name},
                                  "no source associated with node " + launched.name + " (" + launched.package +
                                      "/" + launched.node_type + ")"));
    }
    extraction = fuse_hints(std::move(extraction), hints, launched.name, issues);
    g.nodes.push_back(inst);

    std::map<LinkRole, int> ordinals;
    for (const auto& call : extraction.calls) {
      const LinkRole role = role_for(call.kind);
      const ResourceKind rkind = resource_kind(role);
      std::optional<std::string> resolved;
      if (call.name.known() && !call.name.value().empty()) {
        try {
          resolved = resolve_name(call.name.value(), launched.ns, launched.name, launched.remaps);
        } catch (const Error&) {
        }
      }
      bool unresolved = false;
      if (!resolved) {
        unresolved = true;
        resolved = "?" + launched.name + "/" + to_string(role) + "/" + std::to_string(++ordinals[role]);
      }

      Link link;
      link.node = launched.name;
      link.resource = *resolved;
      link.role = role;
      link.msg_type = call.type;
      link.queue_size = call.queue_size;
      link.conditional = call.conditional || !launched.condition.is_always();
      link.condition_text = join_condition(launched.condition.text, call.condition_text);
      link.provenance = call.provenance;
      link.loc = call.loc;

      auto key = std::make_tuple(link.node, link.resource, role);
      if (auto existing = links.find(key); existing != links.end()) {
        Link& l = existing->second;
        if (l.conditional && !link.conditional) {
          l.conditional = false;
          l.condition_text = link.condition_text;
        }
        if (!l.msg_type.known() && link.msg_type.known()) l.msg_type = link.msg_type;
        if ((!l.queue_size || !l.queue_size->known()) && link.queue_size && link.queue_size->known()) {
          l.queue_size = link.queue_size;
        }
        if (link.provenance == Provenance::hint) l.provenance = Provenance::hint;
        if (!l.loc || (link.loc && *link.loc < *l.loc)) l.loc = link.loc;
      } else {
        links.emplace(key, link);
      }

      auto& acc = resources.try_emplace({rkind, *resolved}, ResourceAcc{.kind = rkind}).first->second;
      acc.unresolved = acc.unresolved || unresolved;
      if (link.conditional) {
        add_condition(acc.conditions, link.condition_text);
      } else {
        acc.any_unconditional = true;
      }
      if (link.msg_type.known() && rkind != ResourceKind::parameter) {
        if (std::find(acc.known_types.begin(), acc.known_types.end(), link.msg_type.value()) ==
            acc.known_types.end()) {
          acc.known_types.push_back(link.msg_type.value());
        }
      }
      if (!acc.loc) acc.loc = link.loc;
    }
  }

  for (const auto& p : launch.parameters) {
    auto& res = params[p.name];
    res.name = p.name;
    res.value = p.value;
    res.condition = p.condition;
  }

  for (const auto& [key, acc] : resources) {
    const auto& [kind, name] = key;
    if (kind == ResourceKind::parameter) {
      auto [it, inserted] = params.try_emplace(name);
      ParamResource& res = it->second;
      if (inserted) {
        res.name = name;
        res.value = Unknowable<std::string>::unknown();
        res.condition = merged_condition(acc);
      }
      res.unresolved = acc.unresolved;
      continue;
    }
    ChannelResource res;
    res.name = name;
    res.kind = kind;
    res.unresolved = acc.unresolved;
    res.condition = merged_condition(acc);
    if (acc.known_types.size() == 1) {
      res.msg_type = acc.known_types.front();
    } else {
      std::string text;
      for (const auto& t : acc.known_types) text += (text.empty() ? "" : "|") + t;
      res.msg_type = Unknowable<std::string>::unknown(text);
    }
    (kind == ResourceKind::topic ? g.topics : g.services).push_back(std::move(res));
  }
  for (auto& [name, p] : params) g.parameters.push_back(std::move(p));
  for (auto& [key, l] : links) g.links.push_back(std::move(l));

  auto by_name = [](const auto& a, const auto& b) { return a.name < b.name; };
  std::sort(g.nodes.begin(), g.nodes.end(), by_name);
  std::sort(g.topics.begin(), g.topics.end(), by_name);
  std::sort(g.services.begin(), g.services.end(), by_name);
  std::sort(g.parameters.begin(), g.parameters.end(), by_name);

  std::set<std::string> topics, services, parameters;
  for (const auto& t : g.topics) topics.insert(t.name);
  for (const auto& s : g.services) services.insert(s.name);
  for (const auto& p : g.parameters) parameters.insert(p.name);
  for (const auto& name : topics) {
    if (services.contains(name) || parameters.contains(name)) {
      issues.push_back(make_issue(Severity::warning, Category::model, "name-collision", EntityScope{name},
                                  "name collision: " + name + " is used by resources of different kinds"));
    }
  }
  for (const auto& name : services) {
    if (parameters.contains(name)) {
      issues.push_back(make_issue(Severity::warning, Category::model, "name-collision", EntityScope{name},
                                  "name collision: " + name + " is used by resources of different kinds"));
    }
  }
  return g;
}

Statistics graph_statistics(const RosGraph& g) {
  Statistics s;
  s.nodes = g.nodes.size();
  s.topics = g.topics.size();
  s.services = g.services.size();
  s.parameters = g.parameters.size();
  s.links = g.links.size();
  for (const auto& l : g.links) s.conditional_links += l.conditional ? 1 : 0;
  for (const auto& n : g.nodes) s.conditional_entities += n.condition.is_always() ? 0 : 1;
  for (const auto* list : {&g.topics, &g.services}) {
    for (const auto& r : *list) {
      s.conditional_entities += r.condition.is_always() ? 0 : 1;
      s.unresolved_entities += r.unresolved ? 1 : 0;
    }
  }
  for (const auto& p : g.parameters) {
    s.conditional_entities += p.condition.is_always() ? 0 : 1;
    s.unresolved_entities += p.unresolved ? 1 : 0;
  }
  return s;
}

void check_integrity(const RosGraph& g) {
  auto unique = [](const auto& items, const char* what) {
    std::set<std::string> seen;
    for (const auto& item : items) {
      if (!seen.insert(item.name).second) throw ValidationError(std::string("duplicate ") + what + " " + item.name);
    }
  };
  unique(g.nodes, "node");
  unique(g.topics, "topic");
  unique(g.services, "service");
  unique(g.parameters, "parameter");
  for (const auto& l : g.links) {
    if (g.node(l.node) == nullptr) throw ValidationError("link references missing node " + l.node);
    bool ok = false;
    switch (resource_kind(l.role)) {
      case ResourceKind::topic: ok = g.topic(l.resource) != nullptr; break;
      case ResourceKind::service: ok = g.service(l.resource) != nullptr; break;
      case ResourceKind::parameter: ok = g.parameter(l.resource) != nullptr; break;
    }
    if (!ok) throw ValidationError("link references missing resource " + l.resource);
    if (!l.conditional) {
      const NodeInstance* n = g.node(l.node);
      if (!n->condition.is_always()) throw ValidationError("unconditional link on conditional node " + l.node);
    }
  }
}

}  // namespace rosa
