#include "qtoken/puf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qtoken::puf {

namespace {

constexpr double kSnapTol = 1e-12;

double projective_pass_probability(const Eigen::VectorXcd& expected,
                                   const Eigen::VectorXcd& response) {
  const std::complex<double> amp = expected.dot(response);
  double p = std::norm(amp);
  if (p > 1.0 - kSnapTol) p = 1.0;
  if (p < kSnapTol) p = 0.0;
  return p;
}

}  // namespace

Eigen::VectorXcd haar_random_state(int dim, Rng& rng) {
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i)
    v[i] = std::complex<double>(rng.normal(), rng.normal());
  return v / v.norm();
}

Eigen::MatrixXcd haar_random_unitary(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      g(i, j) = std::complex<double>(rng.normal(), rng.normal());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  // Fix the phase ambiguity of QR so the distribution is Haar.
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const std::complex<double> d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

SimulatedQPUF::SimulatedQPUF(int dim, std::uint64_t device_seed,
                             std::optional<NoiseChannel> noise)
    : dim_(dim), noise_(noise) {
  if (dim < 2 || dim > 64)
    throw std::invalid_argument("SimulatedQPUF: dim must be in [2, 64]");
  unitary_ = haar_random_unitary(dim, device_seed);
  if ((unitary_ * unitary_.adjoint() -
       Eigen::MatrixXcd::Identity(dim, dim))
          .cwiseAbs()
          .maxCoeff() > 1e-10)
    throw std::logic_error("SimulatedQPUF: unitarity check failed");
}

Eigen::VectorXcd SimulatedQPUF::ideal_response(
    const Eigen::VectorXcd& challenge) const {
  if (challenge.size() != dim_)
    throw std::invalid_argument("SimulatedQPUF: challenge dimension mismatch");
  return unitary_ * challenge;
}

Eigen::VectorXcd SimulatedQPUF::respond(const Eigen::VectorXcd& challenge,
                                        Rng& /*rng*/) const {
  return ideal_response(challenge);
}

double SimulatedQPUF::pass_probability(const Eigen::VectorXcd& challenge,
                                       const Eigen::VectorXcd& expected) const {
  const double f = projective_pass_probability(expected, ideal_response(challenge));
  if (!noise_) return f;
  switch (noise_->kind) {
    case NoiseChannel::Kind::identity:
      return f;
    case NoiseChannel::Kind::depolarizing:
      // rho -> (1-p) rho + p I/d.
      return (1.0 - noise_->parameter) * f + noise_->parameter / dim_;
    case NoiseChannel::Kind::erasure:
      return noise_->parameter * f +
             (1.0 - noise_->parameter) / dim_;
    default:
      throw std::invalid_argument(
          "SimulatedQPUF: only identity/depolarizing/erasure noise supported "
          "for d-dimensional evaluation");
  }
}

int CRPTable::active_count() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(),
                                        [](const CRPEntry& e) { return !e.retired; }));
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXcd& v) {
  nlohmann::json j = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back({v[i].real(), v[i].imag()});
  return j;
}

Eigen::VectorXcd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXcd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[i] = std::complex<double>(j[i][0].get<double>(), j[i][1].get<double>());
  return v;
}

}  // namespace

nlohmann::json CRPTable::to_json() const {
  nlohmann::json es = nlohmann::json::array();
  for (const auto& e : entries)
    es.push_back({{"challenge_id", e.challenge_id},
                  {"challenge", vector_to_json(e.challenge)},
                  {"expected_response", vector_to_json(e.expected_response)},
                  {"retired", e.retired}});
  return {{"dim", dim}, {"entries", es}};
}

CRPTable CRPTable::from_json(const nlohmann::json& j) {
  CRPTable t;
  t.dim = j.at("dim").get<int>();
  for (const auto& e : j.at("entries")) {
    CRPEntry entry;
    entry.challenge_id = e.at("challenge_id").get<int>();
    entry.challenge = vector_from_json(e.at("challenge"));
    entry.expected_response = vector_from_json(e.at("expected_response"));
    entry.retired = e.value("retired", false);
    t.entries.push_back(std::move(entry));
  }
  return t;
}

CRPTable enroll(const SimulatedQPUF& puf, int n_crp, Rng& rng) {
  if (n_crp < 1) throw std::invalid_argument("enroll: n_crp must be >= 1");
  CRPTable table;
  table.dim = puf.dim();
  table.entries.reserve(n_crp);
  for (int i = 0; i < n_crp; ++i) {
    CRPEntry e;
    e.challenge_id = i;
    e.challenge = haar_random_state(puf.dim(), rng);
    e.expected_response = puf.ideal_response(e.challenge);
    table.entries.push_back(std::move(e));
  }
  return table;
}

AuthPolicy::AuthPolicy(int k, int accept_min_in)
    : challenges_per_session(k), accept_min(accept_min_in) {
  if (k < 1) throw std::invalid_argument("AuthPolicy: k must be >= 1");
  if (accept_min < 1 || accept_min > k)
    throw std::invalid_argument("AuthPolicy: accept_min must be in [1, k]");
}

double GenuineDevice::respond_pass_probability(const Eigen::VectorXcd& challenge,
                                               const Eigen::VectorXcd& expected,
                                               Rng& /*rng*/) {
  return puf_->pass_probability(challenge, expected);
}

FixedStateImpersonator::FixedStateImpersonator(Eigen::VectorXcd state)
    : state_(std::move(state)) {
  state_ /= state_.norm();
}

double FixedStateImpersonator::respond_pass_probability(
    const Eigen::VectorXcd& /*challenge*/, const Eigen::VectorXcd& expected,
    Rng& /*rng*/) {
  return projective_pass_probability(expected, state_);
}

EmulationStrategy emulation_strategy_from_string(const std::string& s) {
  if (s == "nearest-observed") return EmulationStrategy::nearest_observed;
  if (s == "mixture") return EmulationStrategy::mixture;
  if (s == "random") return EmulationStrategy::random;
  throw std::invalid_argument("unknown emulation strategy: " + s);
}

std::string to_string(EmulationStrategy s) {
  switch (s) {
    case EmulationStrategy::nearest_observed: return "nearest-observed";
    case EmulationStrategy::mixture: return "mixture";
    case EmulationStrategy::random: return "random";
  }
  return "random";
}

Eigen::VectorXcd adversary_emulate(const std::vector<CRPEntry>& observed,
                                   const Eigen::VectorXcd& challenge,
                                   EmulationStrategy strategy, Rng& rng) {
  const int dim = static_cast<int>(challenge.size());
  if (strategy == EmulationStrategy::random || observed.empty())
    return haar_random_state(dim, rng);
  if (strategy == EmulationStrategy::nearest_observed) {
    double best = -1.0;
    const CRPEntry* pick = nullptr;
    for (const auto& e : observed) {
      const double ov = std::norm(e.challenge.dot(challenge));
      if (ov > best) {
        best = ov;
        pick = &e;
      }
    }
    return pick->expected_response;
  }
  // mixture: overlap-weighted superposition of observed responses,
  // renormalized (a pure-state stand-in for the weighted mixture).
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(dim);
  for (const auto& e : observed)
    acc += std::norm(e.challenge.dot(challenge)) * e.expected_response;
  const double n = acc.norm();
  if (n < 1e-12) return haar_random_state(dim, rng);
  return acc / n;
}

EmulatorAdversary::EmulatorAdversary(std::vector<CRPEntry> observed,
                                     EmulationStrategy strategy)
    : observed_(std::move(observed)), strategy_(strategy) {}

double EmulatorAdversary::respond_pass_probability(
    const Eigen::VectorXcd& challenge, const Eigen::VectorXcd& expected,
    Rng& rng) {
  const Eigen::VectorXcd guess =
      adversary_emulate(observed_, challenge, strategy_, rng);
  return projective_pass_probability(expected, guess);
}

AuthResult authenticate(Responder& device_under_test, CRPTable& table,
                        const AuthPolicy& policy, Rng& rng) {
  std::vector<int> active;
  for (int i = 0; i < static_cast<int>(table.entries.size()); ++i)
    if (!table.entries[i].retired) active.push_back(i);
  if (policy.challenges_per_session > static_cast<int>(active.size()))
    throw std::invalid_argument(
        "authenticate: k exceeds the number of unretired table entries");

  // Sample k without replacement (partial Fisher-Yates).
  for (int i = 0; i < policy.challenges_per_session; ++i) {
    const auto j = i + rng.uniform_int(active.size() - i);
    std::swap(active[i], active[j]);
  }

  AuthResult res;
  nlohmann::json rounds = nlohmann::json::array();
  for (int i = 0; i < policy.challenges_per_session; ++i) {
    CRPEntry& e = table.entries[active[i]];
    const double p = device_under_test.respond_pass_probability(
        e.challenge, e.expected_response, rng);
    const bool pass = rng.bernoulli(p);
    if (pass) ++res.passed;
    e.retired = true;  // one-time use
    rounds.push_back({{"challenge_id", e.challenge_id}, {"pass", pass}});
  }
  res.accept = res.passed >= policy.accept_min;
  res.transcript = {{"rounds", rounds},
                    {"passed", res.passed},
                    {"accept", res.accept}};
  return res;
}

}  // namespace qtoken::puf
