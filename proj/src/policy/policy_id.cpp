#include "policy/policy_id.hpp"

#include "core/errors.hpp"

#include <array>
#include <utility>

namespace kgb {

namespace {

constexpr std::array<std::pair<PolicyId, std::string_view>, 12> kNames{{
    {PolicyId::Greedy, "greedy"},
    {PolicyId::Kg, "kg"},
    {PolicyId::Nkg, "nkg"},
    {PolicyId::Pkg, "pkg"},
    {PolicyId::Thompson, "thompson"},
    {PolicyId::Kgi, "kgi"},
    {PolicyId::Gittins, "gi"},
    {PolicyId::Gibl, "gibl"},
    {PolicyId::Gicg, "gicg"},
    {PolicyId::GiblFh, "gibl-fh"},
    {PolicyId::Ckg, "ckg"},
    {PolicyId::Ikg, "ikg"},
}};

}  // namespace

std::string_view policy_name(PolicyId p) noexcept {
  for (const auto& [id, name] : kNames)
    if (id == p) return name;
  return "unknown";
}

PolicyId parse_policy(std::string_view name) {
  for (const auto& [id, n] : kNames)
    if (n == name) return id;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

std::vector<PolicyId> parse_policy_list(std::string_view text) {
  std::vector<PolicyId> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(parse_policy(item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("policy list is empty");
  return out;
}

std::string join_policy_names(const std::vector<PolicyId>& ps) {
  std::string s;
  for (auto p : ps) {
    if (!s.empty()) s += ',';
    s += policy_name(p);
  }
  return s;
}

bool supports_independent(PolicyId p) noexcept { return p != PolicyId::Ckg; }

bool supports_correlated(PolicyId p) noexcept {
  switch (p) {
    case PolicyId::Ckg:
    case PolicyId::Ikg:
    case PolicyId::Greedy:
    case PolicyId::Kgi:
    case PolicyId::Gittins:
    case PolicyId::Gibl:
    case PolicyId::Gicg:
    case PolicyId::Thompson:
      return true;
    default:
      return false;
  }
}

bool is_stochastic(PolicyId p) noexcept { return p == PolicyId::Thompson; }

bool never_dominated(PolicyId p) noexcept {
  return p == PolicyId::Nkg || p == PolicyId::Pkg || p == PolicyId::Kgi || p == PolicyId::Gittins;
}

}  // namespace kgb
