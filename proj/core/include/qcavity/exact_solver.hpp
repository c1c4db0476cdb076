#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qcavity/model.hpp"
#include "qcavity/observables.hpp"
#include "qcavity/ode.hpp"

namespace qcavity {

// Atom ⊗ Fock state on the truncated space. Amplitudes are ordered excited
// block first, then ground block, photon number 0..nmax within each block.
struct FockQubitState {
    Eigen::VectorXcd amplitudes;
    int nmax = 0;

    int dim() const { return 2 * (nmax + 1); }
    // 0 = excited branch, 1 = ground branch
    Complex amp(int atom, int n) const { return amplitudes[atom * (nmax + 1) + n]; }

    static FockQubitState from_ladder(const InitialLadderState& initial, int nmax);

    double norm() const { return amplitudes.norm(); }
    // Population of the top 10% of Fock levels, both atomic branches.
    double tail_population() const;
};

// Truncated-space realizations: a|n> = sqrt(n)|n-1>, |e> = (1,0), |g> = (0,1),
// sigma_z|e> = +|e>. Field operators act on the (nmax+1)-dim Fock factor,
// atomic operators on the 2-dim factor.
struct OperatorSet {
    int nmax = 0;
    Eigen::MatrixXcd lowering, raising, number;
    Eigen::Matrix2cd sigma_z, sigma_plus, sigma_minus;
};

OperatorSet build_operators(int nmax);

// kron(atom_op, field_op) in the amplitude ordering above.
Eigen::MatrixXcd embed(const Eigen::Matrix2cd& atom_op, const Eigen::MatrixXcd& field_op);

// Full Hamiltonian matrix at time t:
// omega(t) n + chi(t)(a² + a†²) + (Omega/2) sigma_z + g (a + a†)(sigma_+ + sigma_-).
// No rotating-wave approximation anywhere.
Eigen::MatrixXcd hamiltonian_at(double t, const ModelParams& params, const OperatorSet& ops);

// Cached affine decomposition H(t) = omega(t)*N_part + chi(t)*S_part + C_part
// sharing one sparsity pattern, so each stage costs three scaled additions of
// the coefficient arrays plus one banded matvec.
class ExactPropagator {
public:
    ExactPropagator(const ModelParams& params, int nmax);

    // out = -i H(t) psi
    void apply_rhs(double t, const StateVec& psi, StateVec& out) const;

    int nmax() const { return nmax_; }

private:
    ModelParams params_;
    int nmax_;
    std::vector<double> sqrt1_;  // sqrt(n+1), couples n <-> n+1 across branches
    std::vector<double> sqrt2_;  // sqrt((n+1)(n+2)), couples n <-> n+2 in-branch
};

struct EvolveResult {
    std::vector<double> times;
    std::vector<FockQubitState> states;
    StepStats stats;
    double max_norm_drift = 0.0;  // max | ||psi|| - 1 | over samples
    double max_tail = 0.0;        // max tail population over samples
};

// Schrödinger evolution psi' = -i H(t) psi sampled on the grid (grid[0] = 0).
// Throws TruncationError when the tail population breaches the threshold at a
// sample. The norm is never renormalized; its drift is reported.
EvolveResult evolve(const FockQubitState& psi0, const ModelParams& params,
                    const NumericsConfig& numerics, std::span<const double> grid);

// <n>, excited-branch population, <X>, <P> and variances, all via direct sums
// over the amplitudes. Hermitian expectations are checked for imaginary residue.
ObservableRecord exact_record(const FockQubitState& psi, double t);

// rho_F = Tr_atom |psi><psi| on the Fock factor.
Eigen::MatrixXcd reduced_field_density(const FockQubitState& psi);

// Q(z) = <z|rho_F|z>/pi by coherent-state overlap with the Fock expansion,
// evaluated through the spectral decomposition of rho_F. Eigenvalues below
// -1e-10 violate positivity and raise NumericsError.
QGrid husimi_q_numeric(const Eigen::MatrixXcd& rho_field, const QGridSpec& spec);

} // namespace qcavity
