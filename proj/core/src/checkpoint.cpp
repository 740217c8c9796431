#include "untangle/checkpoint.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "untangle/error.hpp"

namespace untangle {
namespace {

constexpr const char* kMagic = "untangle-checkpoint 1";

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t to_size(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) {
    throw ParseError("checkpoint is missing \"" + key + "\"");
  }
  std::size_t value = 0;
  const auto& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("checkpoint value for \"" + key + "\" is not a count: " + s);
  }
  return value;
}

double to_double(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) {
    throw ParseError("checkpoint is missing \"" + key + "\"");
  }
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ParseError("checkpoint value for \"" + key + "\" is not a number: " + it->second);
  }
}

bool to_bool(const std::map<std::string, std::string>& kv, const std::string& key) {
  return to_size(kv, key) != 0;
}

void write_tensors(std::ostream& out, const ParamSet& tensors) {
  out << "tensors " << tensors.size() << '\n';
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const Matrix& m = tensors[i];
    out << "tensor " << tensors.name(i) << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        out << (c == 0 ? "" : " ") << format_double(m(r, c));
      }
      out << '\n';
    }
  }
}

ParamSet read_tensors(std::istream& in) {
  std::string word;
  std::size_t count = 0;
  if (!(in >> word >> count) || word != "tensors") {
    throw ParseError("checkpoint: expected tensor count");
  }
  ParamSet tensors;
  for (std::size_t t = 0; t < count; ++t) {
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> word >> name >> rows >> cols) || word != "tensor" || rows < 0 || cols < 0) {
      throw ParseError("checkpoint: malformed tensor header");
    }
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        std::string token;
        if (!(in >> token)) {
          throw ParseError("checkpoint: tensor " + name + " is truncated");
        }
        try {
          m(r, c) = std::stod(token);
        } catch (const std::exception&) {
          throw ParseError("checkpoint: bad value in tensor " + name + ": " + token);
        }
      }
    }
    tensors.add(name, std::move(m));
  }
  return tensors;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& cp) {
  if (cp.model.has_value() == cp.baseline.has_value()) {
    throw ShapeError("checkpoint must hold exactly one of a model or a baseline");
  }
  out << kMagic << '\n';
  if (cp.baseline) {
    out << "kind=" << to_string(cp.baseline->kind) << '\n';
  } else {
    const auto& c = cp.model->config;
    out << "kind=dialbert\n";
    out << "vocab_size=" << c.encoder.vocab_size << '\n'
        << "width=" << c.encoder.width << '\n'
        << "layers=" << c.encoder.layers << '\n'
        << "heads=" << c.encoder.heads << '\n'
        << "ff_width=" << c.encoder.ff_width << '\n'
        << "encoder_max_seq_len=" << c.encoder.max_seq_len << '\n'
        << "dropout=" << format_double(c.encoder.dropout) << '\n'
        << "lstm_hidden=" << c.lstm_hidden << '\n'
        << "use_context=" << (c.use_context ? 1 : 0) << '\n'
        << "use_features=" << (c.use_features ? 1 : 0) << '\n';
  }
  out << "context_range=" << cp.window.context_range << '\n'
      << "future=" << cp.window.future << '\n'
      << "max_seq_len=" << cp.window.max_seq_len << '\n';
  out << "vocab " << cp.vocab.size() - Vocabulary::kNumReserved << '\n';
  cp.vocab.write(out);
  write_tensors(out, cp.model ? cp.model->tensors : cp.baseline->tensors);
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw ParseError("not an untangle checkpoint (bad header)");
  }
  std::map<std::string, std::string> kv;
  std::size_t vocab_lines = 0;
  bool saw_vocab = false;
  while (std::getline(in, line)) {
    if (line.rfind("vocab ", 0) == 0) {
      vocab_lines = std::stoul(line.substr(6));
      saw_vocab = true;
      break;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("checkpoint: malformed setting line: " + line);
    }
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (!saw_vocab) {
    throw ParseError("checkpoint: missing vocabulary section");
  }
  std::stringstream vocab_text;
  for (std::size_t i = 0; i < vocab_lines; ++i) {
    if (!std::getline(in, line)) {
      throw ParseError("checkpoint: vocabulary section is truncated");
    }
    vocab_text << line << '\n';
  }

  Checkpoint cp;
  cp.vocab = Vocabulary::read(vocab_text);
  cp.window.context_range = to_size(kv, "context_range");
  cp.window.future = to_size(kv, "future");
  cp.window.max_seq_len = to_size(kv, "max_seq_len");
  ParamSet tensors = read_tensors(in);

  const auto kind = kv.count("kind") ? kv.at("kind") : std::string();
  if (kind == "dialbert") {
    ModelConfig c;
    c.encoder.vocab_size = to_size(kv, "vocab_size");
    c.encoder.width = to_size(kv, "width");
    c.encoder.layers = to_size(kv, "layers");
    c.encoder.heads = to_size(kv, "heads");
    c.encoder.ff_width = to_size(kv, "ff_width");
    c.encoder.max_seq_len = to_size(kv, "encoder_max_seq_len");
    c.encoder.dropout = to_double(kv, "dropout");
    c.lstm_hidden = to_size(kv, "lstm_hidden");
    c.use_context = to_bool(kv, "use_context");
    c.use_features = to_bool(kv, "use_features");
    c.validate();
    try {
      cp.model = make_model(c, std::move(tensors));
    } catch (const ShapeError& e) {
      throw ParseError(std::string("checkpoint tensors do not match config: ") + e.what());
    }
  } else {
    BaselineModel b;
    b.kind = parse_baseline_kind(kind);
    const auto hidden = tensors.contains("hidden")
                            ? static_cast<std::size_t>(tensors.at("hidden").cols())
                            : kFeedforwardHidden;
    const auto expected = b.kind == BaselineKind::kLinear ? init_linear()
                                                          : init_feedforward(0, hidden);
    if (!tensors.same_layout(expected.tensors)) {
      throw ParseError("checkpoint tensors do not match baseline kind " + kind);
    }
    b.tensors = std::move(tensors);
    cp.baseline = std::move(b);
  }
  return cp;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  write_checkpoint(out, checkpoint);
  if (!out) {
    throw DataError("failed writing " + path.string());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open checkpoint " + path.string());
  }
  return read_checkpoint(in);
}

}  // namespace untangle
