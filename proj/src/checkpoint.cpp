#include "dyadic/checkpoint.hpp"

#include <map>

namespace dyadic {

namespace {

constexpr std::string_view kMagic = "dyadic-dual-encoder 1";

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }

  std::string_view next() {
    if (done()) throw ValidationError("checkpoint truncated");
    std::size_t nl = text_.find('\n', pos_);
    if (nl == std::string_view::npos) nl = text_.size();
    std::string_view line = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

std::pair<std::string_view, std::string_view> key_value(std::string_view line) {
  auto sp = line.find(' ');
  if (sp == std::string_view::npos) return {line, {}};
  return {line.substr(0, sp), line.substr(sp + 1)};
}

}  // namespace

bool looks_like_checkpoint(std::string_view text) { return text.starts_with(kMagic); }

std::string format_checkpoint(const DualEncoderModel& model) {
  const TrainConfig& c = model.config;
  std::string out(kMagic);
  out += '\n';
  auto kv = [&](std::string_view k, const std::string& v) {
    out += k;
    out += ' ';
    out += v;
    out += '\n';
  };
  kv("cell", std::string(to_string(model.params.cell_type())));
  kv("hidden", std::to_string(model.params.hidden()));
  kv("embed_dim", std::to_string(model.params.embed_dim()));
  kv("lr", format_double(c.lr));
  kv("batch_size", std::to_string(c.batch_size));
  kv("epochs", std::to_string(c.epochs));
  kv("clip", format_double(c.clip));
  kv("lambda", format_double(c.lambda));
  kv("seed", std::to_string(c.seed));
  kv("max_context_tokens", std::to_string(c.max_context_tokens));
  kv("max_response_tokens", std::to_string(c.max_response_tokens));
  kv("min_count", std::to_string(c.min_count));
  kv("reduction", c.reduction == Reduction::mean ? "mean" : "sum");

  kv("vocab", std::to_string(model.vocab.size()));
  for (const auto& tok : model.vocab.tokens()) {
    out += tok;
    out += '\n';
  }
  model.params.for_each_tensor([&](std::string_view name, const Matrix& m) {
    out += "tensor ";
    out += name;
    out += ' ' + std::to_string(m.rows()) + ' ' + std::to_string(m.cols()) + '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = m.row(r);
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) out += ' ';
        out += format_double(row[k]);
      }
      out += '\n';
    }
  });
  out += "end\n";
  return out;
}

DualEncoderModel parse_checkpoint(std::string_view text) {
  LineReader in(text);
  if (in.next() != kMagic) throw ValidationError("not a dual-encoder checkpoint");

  std::map<std::string, std::string, std::less<>> cfg;
  std::size_t vocab_size = 0;
  while (true) {
    auto [k, v] = key_value(in.next());
    if (k == "vocab") {
      vocab_size = static_cast<std::size_t>(parse_int(v));
      break;
    }
    cfg[std::string(k)] = std::string(v);
  }
  auto get = [&](std::string_view key) -> const std::string& {
    auto it = cfg.find(key);
    if (it == cfg.end()) throw ValidationError("checkpoint missing key: " + std::string(key));
    return it->second;
  };
  auto get_size = [&](std::string_view key) { return static_cast<std::size_t>(parse_int(get(key))); };

  DualEncoderModel model;
  TrainConfig& c = model.config;
  c.cell = parse_cell_type(get("cell"));
  c.hidden = get_size("hidden");
  c.embed_dim = get_size("embed_dim");
  c.lr = parse_double(get("lr"));
  c.batch_size = get_size("batch_size");
  c.epochs = get_size("epochs");
  c.clip = parse_double(get("clip"));
  c.lambda = parse_double(get("lambda"));
  c.seed = static_cast<std::uint64_t>(parse_int(get("seed")));
  c.max_context_tokens = get_size("max_context_tokens");
  c.max_response_tokens = get_size("max_response_tokens");
  c.min_count = get_size("min_count");
  c.reduction = get("reduction") == "sum" ? Reduction::sum : Reduction::mean;

  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < vocab_size; ++i) tokens.emplace_back(in.next());
  if (tokens.size() < 2 || tokens[0] != Vocabulary::kPadToken ||
      tokens[1] != Vocabulary::kUnkToken)
    throw ValidationError("checkpoint vocabulary lacks reserved entries");
  model.vocab = Vocabulary(std::span<const std::string>(tokens).subspan(2));

  Rng unused(0);
  model.params = init_params(c.cell, vocab_size, c.embed_dim, c.hidden, unused);
  model.params.for_each_tensor([&](std::string_view name, Matrix& m) {
    const std::string header(in.next());
    const auto parts = split_whitespace(header);
    if (parts.size() != 4 || parts[0] != "tensor" || parts[1] != name)
      throw ValidationError("checkpoint expected tensor " + std::string(name) + " at line " +
                            std::to_string(in.line_no()));
    if (static_cast<std::size_t>(parse_int(parts[2])) != m.rows() ||
        static_cast<std::size_t>(parse_int(parts[3])) != m.cols())
      throw ValidationError("checkpoint tensor " + std::string(name) + " has wrong shape");
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const auto values = split_whitespace(in.next());
      if (values.size() != m.cols())
        throw ValidationError("checkpoint tensor " + std::string(name) + " row has wrong width");
      auto row = m.row(r);
      for (std::size_t k = 0; k < values.size(); ++k) row[k] = parse_double(values[k]);
    }
  });
  if (in.next() != "end") throw ValidationError("checkpoint missing end marker");
  return model;
}

void save_checkpoint(const std::filesystem::path& path, const DualEncoderModel& model) {
  write_file_atomic(path, format_checkpoint(model));
}

DualEncoderModel load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

std::size_t load_word_vectors(const std::filesystem::path& path, const Vocabulary& vocab,
                              EncoderParams& params) {
  const std::string text = read_file(path);
  const std::size_t dim = params.embed_dim();
  std::size_t replaced = 0;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2) continue;  // "count dim" header
    if (fields.size() != dim + 1)
      throw ValidationError("word vector line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size() - 1) + " values, expected " +
                            std::to_string(dim));
    const std::int32_t idx = vocab.index_of(fields[0]);
    if (idx == Vocabulary::kUnk && fields[0] != Vocabulary::kUnkToken) continue;
    auto row = params.embedding.row(static_cast<std::size_t>(idx));
    for (std::size_t k = 0; k < dim; ++k) row[k] = parse_double(fields[k + 1]);
    ++replaced;
  }
  return replaced;
}

}  // namespace dyadic
