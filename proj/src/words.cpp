#include "runlab/words.hpp"

#include "runlab/errors.hpp"

#include <bit>
#include <fstream>
#include <sstream>

namespace runlab {

namespace {

// longest run of ones among the low `count` bits
unsigned inner_max_run(std::uint64_t x) {
  unsigned k = 0;
  while (x) {
    x &= x >> 1;
    ++k;
  }
  return k;
}

std::uint64_t low_mask(unsigned count) {
  return count >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << count) - 1);
}

}  // namespace

Word::Word(std::size_t n, bool bit) : limbs_((n + 63) / 64, bit ? ~std::uint64_t{0} : 0), size_(n) {
  if (bit && (n & 63)) limbs_.back() &= low_mask(n & 63);
}

Word Word::from_string(std::string_view bits) {
  Word w;
  w.limbs_.reserve((bits.size() + 63) / 64);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    char c = bits[i];
    if (c != '0' && c != '1') throw ParseError("expected '0' or '1'", 1, i + 1);
    w.push_back(c == '1');
  }
  return w;
}

Word Word::repeat(bool bit, std::size_t n) { return Word(n, bit); }

bool Word::digit(std::size_t i) const {
  if (i < 1 || i > size_) {
    throw OutOfRange("digit index " + std::to_string(i) + " outside word of length " + std::to_string(size_));
  }
  return (*this)[i - 1];
}

void Word::set(std::size_t i, bool b) {
  if (i < 1 || i > size_) throw OutOfRange("digit index out of range");
  std::uint64_t m = std::uint64_t{1} << ((i - 1) & 63);
  if (b) {
    limbs_[(i - 1) >> 6] |= m;
  } else {
    limbs_[(i - 1) >> 6] &= ~m;
  }
}

void Word::push_back(bool b) {
  if ((size_ & 63) == 0) limbs_.push_back(0);
  if (b) limbs_.back() |= std::uint64_t{1} << (size_ & 63);
  ++size_;
}

void Word::append_bits(std::uint64_t bits, unsigned count) {
  if (count == 0) return;
  bits &= low_mask(count);
  unsigned used = size_ & 63;
  if (used == 0) {
    limbs_.push_back(bits);
  } else {
    limbs_.back() |= bits << used;
    if (used + count > 64) limbs_.push_back(bits >> (64 - used));
  }
  size_ += count;
}

void Word::append_run(bool b, std::size_t n) {
  std::uint64_t v = b ? ~std::uint64_t{0} : 0;
  while (n >= 64) {
    append_bits(v, 64);
    n -= 64;
  }
  append_bits(v, static_cast<unsigned>(n));
}

void Word::append(const Word& w) {
  std::size_t left = w.size_;
  for (std::size_t i = 0; left > 0; ++i) {
    unsigned c = left >= 64 ? 64 : static_cast<unsigned>(left);
    append_bits(w.limbs_[i], c);
    left -= c;
  }
}

Word Word::truncate(std::size_t m) const {
  if (m > size_) throw OutOfRange("truncate beyond word length");
  Word w;
  w.size_ = m;
  w.limbs_.assign(limbs_.begin(), limbs_.begin() + static_cast<std::ptrdiff_t>((m + 63) / 64));
  if (m & 63) w.limbs_.back() &= low_mask(m & 63);
  return w;
}

bool Word::is_prefix_of(const Word& other) const {
  return size_ <= other.size_ && other.truncate(size_) == *this;
}

std::string Word::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if ((*this)[i]) s[i] = '1';
  }
  return s;
}

Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.append(b);
  return w;
}

void RunState::push_bits(std::uint64_t bits, unsigned count) {
  if (count == 0) return;
  bits &= low_mask(count);
  n += count;
  if (bits == low_mask(count)) {
    cur += count;
    if (cur > max) max = cur;
    return;
  }
  // leading part continues the current run; the rest restarts after a zero
  unsigned head = static_cast<unsigned>(std::countr_one(bits));
  if (cur + head > max) max = cur + head;
  unsigned inner = inner_max_run(bits);
  if (inner > max) max = inner;
  unsigned tail = static_cast<unsigned>(std::countl_one(bits << (64 - count)));
  cur = tail;
}

void RunState::push_word(const Word& w, std::size_t m) {
  if (m > w.size()) throw OutOfRange("prefix longer than word");
  const auto& limbs = w.limbs();
  std::size_t i = 0;
  for (; m >= 64; m -= 64) push_bits(limbs[i++], 64);
  if (m) push_bits(limbs[i], static_cast<unsigned>(m));
}

RunState run_state_update(RunState s, bool b) {
  s.push(b);
  return s;
}

std::uint64_t run_length(const Word& w, std::size_t n) {
  if (n > w.size()) {
    throw OutOfRange("n = " + std::to_string(n) + " exceeds word length " + std::to_string(w.size()));
  }
  RunState s;
  s.push_word(w, n);
  return s.max;
}

std::pair<Rational, Rational> code_map_interval(const Word& w) {
  BigInt num = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    num <<= 1;
    if (w[i]) num += 1;
  }
  BigInt den = BigInt(1) << w.size();
  return {Rational(num, den), Rational(BigInt(num + 1), den)};
}

Word parse_bitstring(std::string_view text) {
  Word w;
  std::size_t line = 1, col = 0;
  for (char c : text) {
    ++col;
    if (c == '\n') {
      ++line;
      col = 0;
    } else if (c == '0' || c == '1') {
      w.push_back(c == '1');
    } else if (c != ' ' && c != '\t' && c != '\r') {
      throw ParseError(std::string("unexpected character '") + c + "' in bitstring", line, col);
    }
  }
  return w;
}

Word parse_packed(std::string_view bytes) {
  if (bytes.size() < 8) throw ParseError("packed bitstring shorter than its 8-byte header");
  std::uint64_t n = 0;
  for (int i = 7; i >= 0; --i) n = (n << 8) | static_cast<unsigned char>(bytes[static_cast<std::size_t>(i)]);
  if ((n + 7) / 8 != bytes.size() - 8) {
    throw ParseError("packed header says " + std::to_string(n) + " bits but payload has " +
                     std::to_string(bytes.size() - 8) + " bytes");
  }
  Word w;
  for (std::uint64_t i = 0; i < n; ++i) {
    auto byte = static_cast<unsigned char>(bytes[8 + i / 8]);
    w.push_back((byte >> (7 - i % 8)) & 1U);
  }
  return w;
}

std::string to_packed(const Word& w) {
  std::string out(8 + (w.size() + 7) / 8, '\0');
  std::uint64_t n = w.size();
  for (int i = 0; i < 8; ++i) out[static_cast<std::size_t>(i)] = static_cast<char>((n >> (8 * i)) & 0xFF);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i]) out[8 + i / 8] = static_cast<char>(static_cast<unsigned char>(out[8 + i / 8]) | (0x80U >> (i % 8)));
  }
  return out;
}

Word read_bitstring_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameter("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string data = ss.str();
  for (char c : data) {
    if (c != '0' && c != '1' && c != ' ' && c != '\t' && c != '\r' && c != '\n') {
      // NUL bytes in the length header mark the packed format
      if (data.find('\0') != std::string::npos) return parse_packed(data);
      break;
    }
  }
  return parse_bitstring(data);
}

}  // namespace runlab
