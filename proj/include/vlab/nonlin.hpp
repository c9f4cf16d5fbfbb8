#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vlab {

enum class ProfileDecay { exponential, power };

/// Parametrization of the integrand F(x,s), its partial derivatives, and the
/// lattice-periodic limit F_inf (x-independent for both families here).
///
/// paper-example family:
///   F(r,s) = p(r)|s|^2 + q(r) * sum_j prod_i |s_i|^{l_ij + 1}
///   with p(r) = p0*d(r), q(r) = q_inf + q1*d(r), d(r) = exp(-r) or (1+r)^-t.
///   F_inf(s) = q_inf * sum_j prod_i |s_i|^{l_ij + 1}.
///
/// coupled-power family (m <= 2):
///   F(s) = 1/(2p) |s1|^{2p} + 1/(2p) |s2|^{2p} + (beta/p) |s1|^p |s2|^p,
///   x-independent, so F_inf = F.
///
/// Odd-power convention: |s|^{l+1} has derivative (l+1)|s|^{l-1} s, keeping F
/// even and dF odd in every component.
class NonlinearitySpec {
public:
    enum class Kind { paper_example, coupled_power };

    static NonlinearitySpec paper_example(int m, double p0, double q_inf, double q1,
                                          std::vector<std::vector<double>> couplings,
                                          ProfileDecay decay = ProfileDecay::exponential,
                                          double decay_t = 1.0);
    static NonlinearitySpec coupled_power(int m, double p, double beta);

    Kind kind() const { return kind_; }
    int components() const { return m_; }
    double p0() const { return p0_; }
    double q_inf() const { return q_inf_; }
    double q1() const { return q1_; }
    ProfileDecay decay() const { return decay_; }
    double decay_t() const { return decay_t_; }
    const std::vector<std::vector<double>>& couplings() const { return couplings_; }
    double power_p() const { return power_p_; }
    double power_beta() const { return power_beta_; }

    /// Largest coupling degree sum_i l_ij (the ell of the growth bound);
    /// 2p - 2 for the coupled-power family.
    double max_coupling_degree() const;
    /// Smallest coupling degree (the theta-scaling exponent sigma of F_inf).
    double min_coupling_degree() const;
    /// True when every coupling degree is below 4/N.
    bool subcritical(int dim) const;

    double profile_p(double r) const;
    double profile_q(double r) const;

    double F(double r, std::span<const double> s) const;
    void dF(double r, std::span<const double> s, std::span<double> out) const;
    double Finf(std::span<const double> s) const;
    void dFinf(std::span<const double> s, std::span<double> out) const;

private:
    NonlinearitySpec() = default;

    Kind kind_ = Kind::paper_example;
    int m_ = 1;
    double p0_ = 0.0, q_inf_ = 0.0, q1_ = 0.0;
    ProfileDecay decay_ = ProfileDecay::exponential;
    double decay_t_ = 1.0;
    std::vector<std::vector<double>> couplings_;
    double power_p_ = 2.0, power_beta_ = 0.0;
};

/// Point-evaluation helpers taking a spatial point rather than a radius.
double eval_F(const NonlinearitySpec& spec, std::span<const double> x,
              std::span<const double> s);
void eval_dF(const NonlinearitySpec& spec, std::span<const double> x,
             std::span<const double> s, std::span<double> out);
double eval_Finf(const NonlinearitySpec& spec, std::span<const double> x,
                 std::span<const double> s);
void eval_dFinf(const NonlinearitySpec& spec, std::span<const double> x,
                std::span<const double> s, std::span<double> out);

/// Candidate constants for the growth/coercivity assumptions. Validated on
/// construction via check().
struct AssumptionConstants {
    double A = 1.0, B = 1.0;                  // growth of F and dF
    double Delta = 0.1, S = 1.0, R = 1.0, t = 0.0;
    std::vector<double> alpha;                // per-component lower-bound powers
    double A_prime = 1.0, B_prime = 1.0;      // growth of F_inf and dF_inf
    double beta = 0.5, ell = 1.0;             // growth exponents, 0 < beta < ell < 4/N
    double sigma = 0.0;                       // theta-scaling exponent of F_inf
    double alpha_quot = 1.0;                  // decay-quotient exponent

    /// Throws on violated structural constraints for dimension N.
    void check(int dim) const;
};

struct SamplePlan {
    std::size_t samples = 100000;
    double r_max = 32.0;
    double s_max = 8.0;
    std::uint64_t seed = 7;
    double a3_tol = 1e-6;     // pass threshold for the decay quotient
    double strict_eps = 1e-12; // counts as a strict F > F_inf sample
};

struct AssumptionResult {
    std::string name;
    double margin = 0.0;       // negative => violated at the witness
    bool pass = false;
    std::array<double, 3> witness_x = {0.0, 0.0, 0.0};
    std::vector<double> witness_s;
    double witness_theta = 1.0;
    std::string note;
};

struct AssumptionReport {
    std::vector<AssumptionResult> results;
    bool all_pass = false;
    double strict_fraction = 0.0; // share of samples with F - F_inf strict
};

/// Sampled verification of the growth assumptions with explicit margins.
/// Margins are worst cases over the sampled plan; a negative margin reports
/// the violating sample. This verifies candidate constants, it proves
/// nothing beyond the sample set.
AssumptionReport check_assumptions(const NonlinearitySpec& spec,
                                   const AssumptionConstants& constants,
                                   int dim, const SamplePlan& plan);

} // namespace vlab
