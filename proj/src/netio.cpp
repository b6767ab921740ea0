#include "repnet/netio.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace repnet {

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

std::string format_double17(double v) {
  char buf[64];
  auto [p, ec] =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_double17 failed");
  return std::string(buf, p);
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  std::string next(const char* what) {
    std::string line;
    if (!std::getline(is_, line))
      throw std::runtime_error("net file: unexpected end of file at line " +
                               std::to_string(line_no_ + 1) + " (expected " +
                               what + ")");
    ++line_no_;
    return line;
  }

  int line_no() const { return line_no_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("net file: line " + std::to_string(line_no_) +
                             ": " + msg);
  }

 private:
  std::istream& is_;
  int line_no_ = 0;
};

double parse_double(LineReader& r, const std::string& line) {
  const char* b = line.data();
  const char* e = b + line.size();
  double v = 0.0;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) r.fail("expected a number, got '" + line + "'");
  return v;
}

void write_net_block(std::ostream& os, const Network& net) {
  os << "repnet-net v1\n";
  os << "activation " << activation_name(net.activation()) << "\n";
  os << "dims";
  for (int d : net.dims()) os << ' ' << d;
  os << "\n";
  std::vector<double> p = net.params();
  os << "params " << p.size() << "\n";
  for (double v : p) os << format_double17(v) << "\n";
}

Network read_net_block(LineReader& r) {
  if (r.next("header") != "repnet-net v1") r.fail("expected 'repnet-net v1'");

  std::istringstream act_line(r.next("activation"));
  std::string word, act_name;
  if (!(act_line >> word >> act_name) || word != "activation")
    r.fail("expected 'activation <name>'");
  Activation act;
  try {
    act = activation_from_name(act_name);
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }

  std::istringstream dims_line(r.next("dims"));
  if (!(dims_line >> word) || word != "dims") r.fail("expected 'dims ...'");
  std::vector<int> dims;
  int d;
  while (dims_line >> d) dims.push_back(d);
  if (dims.size() < 2) r.fail("need at least two dimensions");

  std::istringstream params_line(r.next("params"));
  std::size_t count = 0;
  if (!(params_line >> word >> count) || word != "params")
    r.fail("expected 'params <count>'");

  Network net(dims, act);
  if (count != static_cast<std::size_t>(net.param_count()))
    r.fail("params count " + std::to_string(count) +
           " does not match dims (expected " +
           std::to_string(net.param_count()) + ")");

  std::vector<double> p(count);
  for (std::size_t i = 0; i < count; ++i)
    p[i] = parse_double(r, r.next("parameter"));
  net.set_params(p);
  return net;
}

}  // namespace

void save_net(std::ostream& os, const Network& net) { write_net_block(os, net); }

void save_net(const std::string& path, const Network& net) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_net_block(os, net);
}

Network load_net(std::istream& is) {
  LineReader r(is);
  return read_net_block(r);
}

Network load_net(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return load_net(is);
}

void save_net(std::ostream& os, const MultiTaskNet& net) {
  os << "repnet-mtnet v1\n";
  os << "heads " << net.heads.size() << "\n";
  write_net_block(os, net.f);
  for (const Network& h : net.heads) write_net_block(os, h);
}

void save_net(const std::string& path, const MultiTaskNet& net) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  save_net(os, net);
}

MultiTaskNet load_multitask_net(std::istream& is) {
  LineReader r(is);
  if (r.next("header") != "repnet-mtnet v1") r.fail("expected 'repnet-mtnet v1'");
  std::istringstream heads_line(r.next("heads"));
  std::string word;
  std::size_t n = 0;
  if (!(heads_line >> word >> n) || word != "heads")
    r.fail("expected 'heads <n>'");
  MultiTaskNet mt;
  mt.f = read_net_block(r);
  mt.heads.reserve(n);
  for (std::size_t i = 0; i < n; ++i) mt.heads.push_back(read_net_block(r));
  mt.check_dims();
  return mt;
}

MultiTaskNet load_multitask_net(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return load_multitask_net(is);
}

}  // namespace repnet
