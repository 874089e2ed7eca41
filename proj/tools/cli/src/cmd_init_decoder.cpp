#include "rsca_cli/commands.hpp"
#include "rsca_cli/fsutil.hpp"

namespace rsca::cli {

int cmd_init_decoder(const InitDecoderOptions& opt, Streams io) {
  opt.config.validate();
  const DecoderParams params = DecoderParams::init(opt.config, opt.seed);
  write_dir_atomic(opt.out, [&](const fs::path& dir) { save_decoder(params, dir); });
  io.out << "init-decoder: " << to_string(opt.config.upsampler) << " decoder, C=" << opt.config.channels
         << ", placement " << to_string(opt.config.placement) << ", seed " << opt.seed << " -> " << opt.out.string()
         << "\n";
  return 0;
}

}  // namespace rsca::cli
