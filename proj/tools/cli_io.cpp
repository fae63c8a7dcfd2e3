#include "cli_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include <spdlog/spdlog.h>

namespace otkit::cli {

namespace {

constexpr double kRescaleTolerance = 1e-6;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view token, const std::string& where) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
    throw InputError(where + ": cannot parse number '" + std::string(token) + "'");
  }
  if (!std::isfinite(value)) {
    throw InputError(where + ": non-finite value '" + std::string(token) + "'");
  }
  return value;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Matrix parse_csv(std::string_view text, const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    std::vector<double> row;
    while (true) {
      const auto comma = line.find(',');
      row.push_back(parse_number(line.substr(0, comma), where));
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError(where + ": row has " + std::to_string(row.size()) +
                       " values, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(origin + ": no data rows");
  Matrix out(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return out;
}

Matrix read_csv(const std::filesystem::path& path) {
  return parse_csv(slurp(path), path.string());
}

Vector read_vector(const std::filesystem::path& path) {
  const Matrix m = read_csv(path);
  if (m.cols() != 1 && m.rows() != 1) {
    throw InputError(path.string() + ": expected a single column or row");
  }
  return m.cols() == 1 ? Vector(m.col(0)) : Vector(m.row(0).transpose());
}

Vector parse_inline_list(std::string_view text) {
  std::vector<double> values;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',' || text[i] == ' ') {
      const std::string_view token = trim(text.substr(start, i - start));
      if (!token.empty()) values.push_back(parse_number(token, "inline list"));
      start = i + 1;
    }
  }
  if (values.empty()) throw InputError("inline list is empty");
  return Eigen::Map<const Vector>(values.data(),
                                  static_cast<Eigen::Index>(values.size()));
}

Vector normalize_weights(Vector w, const std::string& what) {
  if (w.size() < 1) throw InputError(what + " is empty");
  if ((w.array() < 0.0).any()) throw InputError(what + " has negative entries");
  const double total = w.sum();
  if (std::abs(total - 1.0) > kRescaleTolerance) {
    throw InputError(what + " sums to " + std::to_string(total) +
                     ", not 1 within 1e-6");
  }
  if (total != 1.0) {
    if (std::abs(total - 1.0) > 1e-12) {
      spdlog::warn("{} sums to {:.17g}; rescaling onto the simplex", what, total);
    }
    w /= total;
  }
  return w;
}

std::string format_csv(const Matrix& m) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  return out.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InputError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot move output into place at " + path.string() +
                     ": " + ec.message());
  }
}

GaussianMixture parse_gmm(const nlohmann::json& doc) {
  try {
    const auto weights = doc.at("weights").get<std::vector<double>>();
    const auto means = doc.at("means").get<std::vector<std::vector<double>>>();
    const auto covs =
        doc.at("covs").get<std::vector<std::vector<std::vector<double>>>>();
    if (means.size() != weights.size() || covs.size() != weights.size()) {
      throw InputError("GMM: weights, means and covs must have equal length");
    }
    std::vector<Gaussian> components;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      const auto d = static_cast<Eigen::Index>(means[k].size());
      Vector mean = Eigen::Map<const Vector>(means[k].data(), d);
      if (static_cast<Eigen::Index>(covs[k].size()) != d) {
        throw InputError("GMM: covariance " + std::to_string(k) +
                         " does not match the mean dimension");
      }
      Matrix cov(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        if (static_cast<Eigen::Index>(covs[k][r].size()) != d) {
          throw InputError("GMM: covariance " + std::to_string(k) +
                           " is not square");
        }
        for (Eigen::Index c = 0; c < d; ++c) cov(r, c) = covs[k][r][c];
      }
      components.emplace_back(std::move(mean), std::move(cov));
    }
    Vector w = Eigen::Map<const Vector>(weights.data(),
                                        static_cast<Eigen::Index>(weights.size()));
    return GaussianMixture(normalize_weights(std::move(w), "GMM weights"),
                           std::move(components));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("GMM: ") + e.what());
  }
}

GaussianMixture read_gmm(const std::filesystem::path& path) {
  try {
    return parse_gmm(nlohmann::json::parse(slurp(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace otkit::cli
