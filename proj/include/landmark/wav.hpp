#pragma once

#include <filesystem>

#include "landmark/signal.hpp"

namespace landmark {

enum class WavEncoding { kPcm16, kFloat32 };

/// Decodes a RIFF/WAVE file (PCM 8/16/24/32-bit or IEEE float 32/64-bit,
/// WAVE_FORMAT_EXTENSIBLE included) or an uncompressed NIST SPHERE file as
/// shipped with TIMIT. Multichannel audio is mean-downmixed. No resampling.
///
/// Throws IoError when the file cannot be read and FormatError for
/// unsupported encodings or zero-length audio.
SampledSignal read_wav(const std::filesystem::path& path);

/// Writes a mono RIFF/WAVE file. Samples are clipped to [-1, 1] for kPcm16.
void write_wav(const std::filesystem::path& path, const SampledSignal& sig,
               WavEncoding encoding = WavEncoding::kPcm16);

}  // namespace landmark
