#include "mwstats/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mwstats/errors.hpp"

namespace mwstats {

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& base, const char* suffix) {
  return std::filesystem::path(base.string() + suffix);
}

void put_le(std::ostream& os, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

std::vector<int> parse_key(const std::string& key, std::size_t expected) {
  std::vector<int> out;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed moment key '" + key + "'");
    }
  }
  if (out.size() != expected) {
    throw std::invalid_argument("moment key '" + key + "' must have " + std::to_string(expected) +
                                " indices");
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_record_binary(const DetectionRecord& rec, const std::filesystem::path& base) {
  rec.validate();
  std::ofstream bin(with_suffix(base, ".bin"), std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + with_suffix(base, ".bin").string());
  for (std::size_t i = 0; i < rec.size(); ++i) {
    put_le(bin, rec.envelopes_1[i].real());
    put_le(bin, rec.envelopes_1[i].imag());
    put_le(bin, rec.envelopes_2[i].real());
    put_le(bin, rec.envelopes_2[i].imag());
  }
  Json side;
  side["N"] = rec.size();
  side["gains"] = {rec.chain_gains[0], rec.chain_gains[1]};
  side["if_frequency"] = rec.if_frequency;
  side["seed"] = rec.seed;
  std::ofstream js(with_suffix(base, ".json"));
  js << side.dump(2) << '\n';
}

DetectionRecord read_record_binary(const std::filesystem::path& base) {
  std::ifstream js(with_suffix(base, ".json"));
  if (!js) throw std::runtime_error("cannot open " + with_suffix(base, ".json").string());
  const Json side = Json::parse(js);
  DetectionRecord rec;
  const auto n = side.at("N").get<std::size_t>();
  rec.chain_gains = {side.at("gains").at(0).get<double>(), side.at("gains").at(1).get<double>()};
  rec.if_frequency = side.value("if_frequency", 11e6);
  rec.seed = side.value("seed", std::uint64_t{0});

  std::ifstream bin(with_suffix(base, ".bin"), std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + with_suffix(base, ".bin").string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
  if (bytes.size() != n * 32) {
    throw std::runtime_error("binary record holds " + std::to_string(bytes.size()) +
                             " bytes, sidecar expects " + std::to_string(n * 32));
  }
  rec.envelopes_1.resize(n);
  rec.envelopes_2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* p = bytes.data() + 32 * i;
    rec.envelopes_1[i] = {get_le(p), get_le(p + 8)};
    rec.envelopes_2[i] = {get_le(p + 16), get_le(p + 24)};
  }
  rec.validate();
  return rec;
}

void write_record_csv(const DetectionRecord& rec, const std::filesystem::path& path) {
  rec.validate();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << "index,I1,Q1,I2,Q2\n";
  for (std::size_t i = 0; i < rec.size(); ++i) {
    os << i << ',' << format_double(rec.envelopes_1[i].real()) << ','
       << format_double(rec.envelopes_1[i].imag()) << ',' << format_double(rec.envelopes_2[i].real())
       << ',' << format_double(rec.envelopes_2[i].imag()) << '\n';
  }
}

DetectionRecord read_record_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != "index,I1,Q1,I2,Q2") {
    throw std::runtime_error(path.string() + ": expected header 'index,I1,Q1,I2,Q2'");
  }
  DetectionRecord rec;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double v[5];
    int k = 0;
    while (std::getline(ss, cell, ',') && k < 5) v[k++] = std::strtod(cell.c_str(), nullptr);
    if (k != 5) throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 5 columns");
    rec.envelopes_1.emplace_back(v[1], v[2]);
    rec.envelopes_2.emplace_back(v[3], v[4]);
  }
  rec.validate();
  return rec;
}

Json moments_to_json(const MomentSet& m) {
  Json out;
  out["ordering"] = to_string(m.ordering());
  Json entries = Json::object();
  for (const auto& [key, value] : m.entries()) {
    entries[std::to_string(key.first) + "," + std::to_string(key.second)] = {value.real(), value.imag()};
  }
  out["moments"] = std::move(entries);
  return out;
}

MomentSet moments_from_json(const Json& j) {
  const std::string ord = j.value("ordering", std::string("normal"));
  if (ord != "normal" && ord != "symmetrized") throw std::invalid_argument("unknown ordering '" + ord + "'");
  MomentSet m(ord == "normal" ? Ordering::Normal : Ordering::Symmetrized);
  for (const auto& [key, value] : j.at("moments").items()) {
    const auto idx = parse_key(key, 2);
    m.set(idx[0], idx[1], {value.at(0).get<double>(), value.at(1).get<double>()});
  }
  return m;
}

Json cross_moments_to_json(const CrossMomentSet& cm) {
  Json entries = Json::object();
  for (const auto& [key, value] : cm.entries()) {
    entries[std::to_string(key[0]) + "," + std::to_string(key[1]) + "," + std::to_string(key[2]) +
            "," + std::to_string(key[3])] = {value, 0.0};
  }
  Json out;
  out["moments"] = std::move(entries);
  return out;
}

CrossMomentSet cross_moments_from_json(const Json& j) {
  CrossMomentSet cm;
  for (const auto& [key, value] : j.at("moments").items()) {
    const auto idx = parse_key(key, 4);
    cm.set({idx[0], idx[1], idx[2], idx[3]}, value.at(0).get<double>());
  }
  return cm;
}

Json fit_to_json(const FitResult& fit) {
  Json out;
  Json params = Json::object(), errors = Json::object();
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    params[fit.names[i]] = fit.values(k);
    const double se = std::sqrt(fit.covariance(k, k));
    errors[fit.names[i]] = std::isfinite(se) ? Json(se) : Json(nullptr);
  }
  out["parameters"] = std::move(params);
  out["standard_errors"] = std::move(errors);
  Json corr = Json::array();
  const Eigen::MatrixXd c = fit.correlation();
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      row.push_back(std::isfinite(c(i, j)) ? Json(c(i, j)) : Json(nullptr));
    }
    corr.push_back(std::move(row));
  }
  out["correlation"] = std::move(corr);
  out["residual_norm"] = fit.residual_norm;
  out["converged"] = fit.converged;
  out["iterations"] = fit.iterations;
  out["weighted"] = fit.weighted;
  if (!fit.message.empty()) out["message"] = fit.message;
  return out;
}

}  // namespace mwstats
