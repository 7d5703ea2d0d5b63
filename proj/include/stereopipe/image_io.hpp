#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stereopipe/image.hpp"

namespace stereopipe {

/// Thrown on malformed or out-of-contract image data.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Binary PGM (P5). 8-bit images use maxval 255; disparity rasters use
// maxval 65535 with big-endian samples holding the raw Q12.4 words
// (invalid pixels stay 0xFFFF). PFM is grayscale "Pf", scale -1.0
// (little-endian), rows bottom-to-top, invalid pixels written as -inf.

GrayImage load_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> save_pgm(const GrayImage& img);

DisparityMap load_disparity_pgm16(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> save_disparity_pgm16(const DisparityMap& map);

DisparityMap load_disparity_pfm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> save_disparity_pfm(const DisparityMap& map);

// File convenience wrappers.
GrayImage load_pgm_file(const std::string& path);
void save_pgm_file(const std::string& path, const GrayImage& img);
DisparityMap load_disparity_file(const std::string& path);  // by extension: .pgm or .pfm
void save_disparity_file(const std::string& path, const DisparityMap& map);

std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace stereopipe
