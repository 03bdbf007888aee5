#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace selfsim {

// Stable error codes, also used by the CLI for machine-readable errors.
enum class errc {
  invalid_ratio,
  too_few_maps,
  all_maps_share_fixed_point,
  symbol_out_of_range,
  budget_exceeded,
  empty_input,
  precondition_violated,
  overlap_present,
  zero_mass_node,
  depth_exceeded,
  out_of_range,
  zero_scale,
  zero_mass_interval,
  unknown_preset,
  invalid_param,
  invalid_probability,
  parse_error,
  validation_error,
};

const char* errc_name(errc c);

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

// Work would exceed the configured point budget.  `required` is a decimal
// string because |alphabet|^n can exceed any machine integer.
class budget_error : public error {
 public:
  budget_error(std::string required, std::uint64_t allowed,
               const std::string& what)
      : error(errc::budget_exceeded, what),
        required_(std::move(required)),
        allowed_(allowed) {}
  const std::string& required() const { return required_; }
  std::uint64_t allowed() const { return allowed_; }

 private:
  std::string required_;
  std::uint64_t allowed_;
};

[[noreturn]] inline void throw_error(errc code, const std::string& what) {
  throw error(code, what);
}

inline constexpr std::uint64_t kDefaultPointBudget = 10'000'000;

}  // namespace selfsim
