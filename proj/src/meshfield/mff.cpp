#include "porecouple/meshfield/mff.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "porecouple/core/error.hpp"

namespace porecouple::meshfield {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'M', 'F', 'F', '1'};
constexpr std::size_t kPreambleSize = 12;  // magic + u64 header length

class PayloadWriter {
 public:
  /// Appends `data` and returns the block descriptor.
  json append(const double* data, std::size_t count) {
    json block = {{"offset", bytes_.size()}, {"count", count}};
    for (std::size_t i = 0; i < count; ++i) {
      const auto bits = std::bit_cast<std::uint64_t>(data[i]);
      for (int b = 0; b < 8; ++b) {
        bytes_.push_back(static_cast<std::uint8_t>((bits >> (8 * b)) & 0xffu));
      }
    }
    return block;
  }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class PayloadReader {
 public:
  PayloadReader(const std::vector<std::uint8_t>& bytes, std::size_t start)
      : bytes_(bytes), start_(start) {}

  std::vector<double> read(const json& block, const std::string& what) const {
    std::uint64_t offset = 0;
    std::uint64_t count = 0;
    try {
      offset = block.at("offset").get<std::uint64_t>();
      count = block.at("count").get<std::uint64_t>();
    } catch (const json::exception&) {
      throw FormatError("malformed payload descriptor for " + what, start_);
    }
    const std::size_t available = bytes_.size() - start_;
    if (offset > available || count > (available - offset) / 8) {
      throw FormatError("truncated payload for " + what, bytes_.size());
    }
    std::vector<double> out(count);
    const std::size_t base = start_ + offset;
    for (std::size_t i = 0; i < count; ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(bytes_[base + 8 * i + b]) << (8 * b);
      }
      out[i] = std::bit_cast<double>(bits);
    }
    return out;
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t start_;
};

json mesh_header(const Mesh& mesh, PayloadWriter& payload) {
  const auto nc = static_cast<std::size_t>(mesh.n_cells());
  const auto nf = static_cast<std::size_t>(mesh.n_faces());
  std::vector<double> centroids, volumes, areas, normals, face_centroids;
  centroids.reserve(2 * nc);
  volumes.reserve(nc);
  for (const auto& c : mesh.cells()) {
    centroids.push_back(c.centroid.x());
    centroids.push_back(c.centroid.y());
    volumes.push_back(c.volume);
  }
  std::vector<Index> left, right;
  std::vector<std::string> tags;
  areas.reserve(nf);
  for (const auto& f : mesh.faces()) {
    areas.push_back(f.area);
    normals.push_back(f.normal.x());
    normals.push_back(f.normal.y());
    face_centroids.push_back(f.centroid.x());
    face_centroids.push_back(f.centroid.y());
    left.push_back(f.left);
    right.push_back(f.right.value_or(-1));
    tags.push_back(f.boundary_tag);
  }
  json h = {
      {"dim", mesh.dim()},
      {"n_cells", nc},
      {"n_faces", nf},
      {"face_left", left},
      {"face_right", right},
      {"face_tag", tags},
      {"cell_centroids", payload.append(centroids.data(), centroids.size())},
      {"cell_volumes", payload.append(volumes.data(), volumes.size())},
      {"face_areas", payload.append(areas.data(), areas.size())},
      {"face_normals", payload.append(normals.data(), normals.size())},
      {"face_centroids", payload.append(face_centroids.data(), face_centroids.size())},
  };
  if (const auto& s = mesh.structured()) {
    const double spacing[2] = {s->dx, s->dy};
    h["structured"] = {{"nx", s->nx}, {"ny", s->ny}, {"spacing", payload.append(spacing, 2)}};
  }
  return h;
}

Mesh mesh_from_header(const json& h, const PayloadReader& payload) {
  const auto nc = h.at("n_cells").get<std::size_t>();
  const auto nf = h.at("n_faces").get<std::size_t>();
  const auto centroids = payload.read(h.at("cell_centroids"), "cell_centroids");
  const auto volumes = payload.read(h.at("cell_volumes"), "cell_volumes");
  const auto areas = payload.read(h.at("face_areas"), "face_areas");
  const auto normals = payload.read(h.at("face_normals"), "face_normals");
  const auto face_centroids = payload.read(h.at("face_centroids"), "face_centroids");
  const auto left = h.at("face_left").get<std::vector<Index>>();
  const auto right = h.at("face_right").get<std::vector<Index>>();
  const auto tags = h.at("face_tag").get<std::vector<std::string>>();
  if (centroids.size() != 2 * nc || volumes.size() != nc || areas.size() != nf ||
      normals.size() != 2 * nf || face_centroids.size() != 2 * nf || left.size() != nf ||
      right.size() != nf || tags.size() != nf) {
    throw InvalidArgument("mesh arrays disagree with n_cells/n_faces");
  }
  std::vector<Cell> cells(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    cells[i] = {Point2d(centroids[2 * i], centroids[2 * i + 1]), volumes[i]};
  }
  std::vector<Face> faces(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    auto& f = faces[i];
    f.area = areas[i];
    f.normal = Point2d(normals[2 * i], normals[2 * i + 1]);
    f.centroid = Point2d(face_centroids[2 * i], face_centroids[2 * i + 1]);
    f.left = left[i];
    if (right[i] >= 0) f.right = right[i];
    f.boundary_tag = tags[i];
  }
  std::optional<StructuredInfo> structured;
  if (h.contains("structured")) {
    const auto& s = h.at("structured");
    const auto spacing = payload.read(s.at("spacing"), "structured.spacing");
    if (spacing.size() != 2) throw InvalidArgument("structured spacing needs 2 values");
    structured = StructuredInfo{s.at("nx").get<Index>(), s.at("ny").get<Index>(), spacing[0],
                                spacing[1]};
  }
  return Mesh(h.at("dim").get<int>(), std::move(cells), std::move(faces), structured);
}

}  // namespace

std::vector<std::uint8_t> encode_mff(const MffDocument& doc) {
  PayloadWriter payload;
  json header;
  header["format_version"] = doc.format_version;
  header["mesh"] = mesh_header(doc.mesh, payload);
  json fields = json::array();
  for (const auto& f : doc.fields) {
    check_field(f, doc.mesh);
    const double time = f.time;
    // values are row-major, so the storage order is the on-disk order
    fields.push_back({
        {"name", f.name},
        {"support", to_string(f.support)},
        {"n_components", f.n_components()},
        {"component_names", f.component_names},
        {"unit", f.unit},
        {"time", payload.append(&time, 1)},
        {"values", payload.append(f.values.data(), static_cast<std::size_t>(f.values.size()))},
    });
  }
  header["fields"] = std::move(fields);

  const std::string text = header.dump();
  std::vector<std::uint8_t> out;
  out.reserve(kPreambleSize + text.size() + payload.bytes().size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  const auto length = static_cast<std::uint64_t>(text.size());
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>((length >> (8 * b)) & 0xffu));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), payload.bytes().begin(), payload.bytes().end());
  return out;
}

MffDocument decode_mff(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4) throw FormatError("file too short for MFF magic", bytes.size());
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw FormatError("bad magic, expected MFF1", 0);
  }
  if (bytes.size() < kPreambleSize) throw FormatError("truncated header length", bytes.size());
  std::uint64_t length = 0;
  for (int b = 0; b < 8; ++b) length |= static_cast<std::uint64_t>(bytes[4 + b]) << (8 * b);
  if (length > bytes.size() - kPreambleSize) {
    throw FormatError("truncated JSON header", bytes.size());
  }
  const auto header_end = kPreambleSize + static_cast<std::size_t>(length);
  json header;
  try {
    header = json::parse(bytes.begin() + kPreambleSize, bytes.begin() + header_end);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON header: ") + e.what(), kPreambleSize + e.byte);
  }

  try {
    const int version = header.at("format_version").get<int>();
    if (version != kMffFormatVersion) {
      throw FormatError("unsupported MFF version " + std::to_string(version), kPreambleSize);
    }
    PayloadReader payload(bytes, header_end);
    Mesh mesh = mesh_from_header(header.at("mesh"), payload);
    std::vector<Field> fields;
    for (const auto& fh : header.at("fields")) {
      Field f;
      f.name = fh.at("name").get<std::string>();
      f.support = support_from_string(fh.at("support").get<std::string>());
      f.component_names = fh.at("component_names").get<std::vector<std::string>>();
      f.unit = fh.at("unit").get<std::string>();
      const auto time = payload.read(fh.at("time"), f.name + ".time");
      if (time.size() != 1) throw InvalidArgument("field time must be one value");
      f.time = time[0];
      const auto nc = fh.at("n_components").get<Index>();
      const auto ne = n_entities(mesh, f.support);
      const auto values = payload.read(fh.at("values"), f.name + ".values");
      if (static_cast<Index>(values.size()) != ne * nc) {
        throw InvalidArgument("field '" + f.name + "' payload size does not match the mesh");
      }
      f.values = Eigen::Map<const RowMatrix<double>>(values.data(), ne, nc);
      check_field(f, mesh);
      fields.push_back(std::move(f));
    }
    return MffDocument{version, std::move(mesh), std::move(fields)};
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed MFF header: ") + e.what(), kPreambleSize);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("inconsistent MFF content: ") + e.what(), kPreambleSize);
  }
}

void write_mff(const std::filesystem::path& path, const MffDocument& doc) {
  const auto bytes = encode_mff(doc);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

MffDocument read_mff(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_mff(bytes);
}

}  // namespace porecouple::meshfield
