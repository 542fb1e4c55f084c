#ifndef CUSPBERGMAN_KERNEL_CONFIG_HPP
#define CUSPBERGMAN_KERNEL_CONFIG_HPP

#include <istream>
#include <string>

#include "cuspbergman/base_kernel.hpp"

namespace cuspbergman {

// Kernel description as read from a key = value config file. Recognized
// keys: base (point|theta), tau_re, tau_im, group_order, character_index,
// unitaries (path to a projector JSON file). '#' starts a comment.
struct KernelSpec {
  std::string base = "point";
  double tau_re = 0.0;
  double tau_im = 1.0;
  std::int64_t group_order = 1;
  std::int64_t character_index = 0;
  std::string unitaries_path;

  BaseKernel build() const;
};

KernelSpec parse_kernel_config(std::istream& in);
KernelSpec parse_kernel_config_file(const std::string& path);

// Projector unitary families from JSON: an object keyed by the decimal level
// q, each value an array of |Gamma| matrices given as row-major arrays of
// [re, im] pairs.
ProjectorUnitaries load_projector_unitaries(const std::string& path);

}  // namespace cuspbergman

#endif
