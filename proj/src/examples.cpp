#include "bcn/examples.hpp"

namespace bcn::examples {

namespace {

CompiledNetwork base(NetworkClass kind) {
  CompiledNetwork net;
  net.kind = kind;
  net.n = 3;
  net.m = 1;
  net.permutation = LogicalMatrix::identity(8);
  net.node_names = {"x1", "x2", "x3"};
  net.input_names = {"u"};
  return net;
}

LyapunovCertificate certificate(const CompiledNetwork& net, const LogicalMatrix& k,
                                std::initializer_list<const char*> gains) {
  LyapunovCertificate cert;
  cert.kind = net.kind;
  RationalVector g;
  for (const char* s : gains) g.push_back(parse_rational(s));
  cert.gains.push_back(std::move(g));
  const VerificationReport report = verify_certificate(cert, close_loop(net, k));
  cert.min_slack = report.min_slack;
  cert.contraction_ratio = report.contraction_ratio;
  return cert;
}

}  // namespace

CompiledNetwork example1_network() {
  CompiledNetwork net = base(NetworkClass::deterministic);
  net.modes.push_back(delta(8, {2, 3, 3, 3, 7, 7, 8, 8, 4, 4, 6, 6, 8, 8, 5, 5}));
  net.mode_names = {"main"};
  return net;
}

LogicalMatrix example1_gain() { return delta(2, {1, 1, 2, 2, 2, 1, 2, 1}); }

LyapunovCertificate example1_certificate() {
  return certificate(example1_network(), example1_gain(), {"5", "4.5", "4", "6", "1", "3", "2", "0"});
}

CompiledNetwork example2_network() {
  CompiledNetwork net = base(NetworkClass::probabilistic);
  net.modes.push_back(delta(8, {3, 1, 6, 6, 2, 2, 8, 8, 1, 1, 1, 8, 4, 3, 5, 8}));
  net.modes.push_back(delta(8, {1, 1, 2, 6, 8, 7, 7, 7, 6, 1, 1, 1, 5, 5, 5, 8}));
  net.mode_names = {"g1", "g2"};
  net.probs = {Rational(3, 10), Rational(7, 10)};
  return net;
}

LogicalMatrix example2_gain() { return delta(2, {2, 2, 1, 1, 1, 1, 2, 2}); }

LyapunovCertificate example2_certificate() {
  return certificate(example2_network(), example2_gain(), {"8.3", "9.3", "9.4", "6.5", "2.8", "6.4", "3.6", "0"});
}

}  // namespace bcn::examples
