#include "bandit_hjb/scaling.hpp"

#include "bandit_hjb/errors.hpp"

namespace bhjb {

ScalingFactor ScalingFactor::from_name(const std::string& name) {
  if (name == "sqrt") return sqrt_n();
  if (name == "linear" || name == "n") return linear_n();
  throw ConfigError("unknown scaling factor '" + name + "' (sqrt | linear)");
}

PowerSeq PowerSeq::from_keyvalues(const KeyValueMap& kv, const std::string& prefix) {
  return from_keyvalues(kv, prefix, PowerSeq{});
}

PowerSeq PowerSeq::from_keyvalues(const KeyValueMap& kv, const std::string& prefix,
                                  PowerSeq fallback) {
  const bool any = kv.has(prefix) || !kv.keys_with_prefix(prefix + ".c_").empty();
  if (!any) return fallback;
  PowerSeq seq;
  seq.c_const = kv.get_double_or(prefix, 0.0);
  seq.c_n = kv.get_double_or(prefix + ".c_n", 0.0);
  seq.c_sqrt = kv.get_double_or(prefix + ".c_sqrt", 0.0);
  seq.c_const = kv.get_double_or(prefix + ".c_const", seq.c_const);
  seq.c_inv_sqrt = kv.get_double_or(prefix + ".c_inv_sqrt", 0.0);
  seq.c_inv_n = kv.get_double_or(prefix + ".c_inv_n", 0.0);
  return seq;
}

}  // namespace bhjb
