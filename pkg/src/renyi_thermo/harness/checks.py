"""The registered property checks.

Every trial function returns a list of margins (see :mod:`.runner`).
Claims that carry their own threshold use ``ctx.close(d, T)`` or
``ctx.atleast(x, b, T)``, which rescale the margin so that the run
tolerance decides pass/fail exactly at ``T``.
"""
from __future__ import annotations

import math

import numpy as np

from ..entropy import RANK_TOL, LiebProbe, lieb_trace, renyi_entropy, renyi_relative, sandwiched_renyi
from ..linalg import (
    HermitianMatrix,
    SpectralFunction,
    as_hermitian,
    determinant,
    log_trace_spectral,
    matrix_fn,
)
from ..states import DensityMatrix, as_positive, gibbs_state, maximally_mixed, pure_state
from ..thermo import (
    alpha_derivative,
    alpha_expectation,
    equilibrium_energy,
    free_energy,
    internal_energy,
    log_partition,
    logZ_curvature,
    trace_distance,
)
from ..uncertainty import (
    ObservableSet,
    alpha_variance,
    build_report,
    commutator_mean,
    covariance,
    deviations,
    deviations_proportional,
    lemma_split_check,
    moments,
    robertson_gap,
    schrodinger_gap,
    split_eigenvalues,
)
from .runner import TrialContext, register

PB_ALPHAS = (0.3, 0.5, 2.0, 5.0)
PB_BETAS = (-1.0, 0.5, 1.0, 3.0)
LIMIT_BETA = 200.0
WITNESS_DISTANCE = 1e-2
WITNESS_MARGIN = 1e-6


def _finite(a):
    return math.isfinite(a)


def _proper(a):
    """alpha in (0, 1) or (1, inf)."""
    return 0.0 < a < math.inf and a != 1.0


def _subunit(a):
    return 0.0 < a < 1.0


def _mix(t: float, A, B) -> np.ndarray:
    return (1.0 - t) * _data(A) + t * _data(B)


def _data(X):
    return X.data if isinstance(X, HermitianMatrix) else np.asarray(X)


def _conj(U: np.ndarray, X) -> np.ndarray:
    return U @ _data(X) @ U.conj().T


def _toward(ctx: TrialContext, base: DensityMatrix) -> tuple[DensityMatrix, float]:
    """A state at trace distance exactly ``WITNESS_DISTANCE`` from ``base``."""
    omega = pure_state(ctx.complex_matrix(base.n, 1)[:, 0])
    t = min(1.0, WITNESS_DISTANCE / trace_distance(omega, base))
    rho = DensityMatrix(_mix(t, base, omega))
    return rho, trace_distance(rho, base)


# -- entropies ----------------------------------------------------------------

@register("entropy_bounds", "0 <= S_alpha <= log n, zero exactly on pure states, log n on the maximally mixed state")
def entropy_bounds(ctx: TrialContext):
    n = ctx.n
    rank = int(ctx.rng.integers(1, n + 1)) if ctx.index % 4 == 3 else None
    rho = ctx.state(rank=rank)
    ctx.record(rho=rho, rank=rank)
    out = []
    for a in ctx.config.alphas:
        S = renyi_entropy(rho, a)
        out.append(ctx.atleast(S, 0.0, 1e-10))
        out.append(ctx.atleast(math.log(n) - S, 0.0, 1e-10))
        out.append(ctx.close(renyi_entropy(maximally_mixed(n), a) - math.log(n), 1e-10))
    if renyi_entropy(rho, 2.0) <= 1e-9:
        out.append(ctx.atleast(float(rho.spectrum[-1]), 1.0 - 1e-6))
    if rank == 1:
        out += [ctx.close(renyi_entropy(rho, a), 1e-9) for a in ctx.config.alphas]
    return out


@register("entropy_monotone_alpha", "S_alpha is non-increasing in alpha and continuous at alpha = 1 and inf")
def entropy_monotone_alpha(ctx: TrialContext):
    rho = ctx.state()
    ctx.record(rho=rho)
    S = [renyi_entropy(rho, a) for a in ctx.config.alphas]
    out = [ctx.atleast(S[k] - S[k + 1]) for k in range(len(S) - 1)]
    S1 = renyi_entropy(rho, 1.0)
    for a in (1.0 - 1e-6, 1.0 + 1e-6, 1.0 - 2e-6, 1.0 + 2e-6):
        out.append(ctx.close(renyi_entropy(rho, a) - S1, 1e-4))
    s_inf = renyi_entropy(rho, math.inf)
    s_big = renyi_entropy(rho, 1e4)
    out.append(ctx.atleast(s_big - s_inf))
    out.append(ctx.close(s_big - s_inf, 1e-2))
    return out


@register("S_concave", "S_alpha is concave in rho for 0 < alpha < 1")
def s_concave(ctx: TrialContext):
    r1, r2 = ctx.state(), ctx.state()
    t = float(ctx.rng.uniform())
    ctx.record(rho1=r1, rho2=r2, t=t)
    mix = DensityMatrix(_mix(t, r1, r2))
    out = []
    for a in ctx.config.alphas_where(_subunit):
        lhs = renyi_entropy(mix, a)
        out.append(ctx.atleast(lhs - (1 - t) * renyi_entropy(r1, a) - t * renyi_entropy(r2, a)))
    return out


@register("lieb_concavity", "(A, B) -> Tr K* A^q K B^r is jointly concave for q, r >= 0, q + r <= 1")
def lieb_concavity(ctx: TrialContext):
    n = ctx.n
    A1, A2, B1, B2 = (ctx.positive() for _ in range(4))
    if ctx.index % 2 == 0:
        K = np.eye(n, dtype=np.complex128)
        q = ctx.cycle((0.25, 0.5, 0.9))
        r = 1.0 - q
    else:
        K = ctx.complex_matrix()
        q, r = sorted(ctx.rng.uniform(size=2))
        q, r = q, r - q  # uniform on the simplex q + r <= 1
        if ctx.rng.uniform() < 0.5:
            q, r = r, q
    lam = ctx.cycle((0.25, 0.5, 0.75))
    ctx.record(A1=A1, A2=A2, B1=B1, B2=B2, K=K, q=q, r=r, lam=lam)
    probe = LiebProbe(K, q, r)
    mixed = lieb_trace(probe, as_positive(_mix(lam, A1, A2)), as_positive(_mix(lam, B1, B2)))
    ends = (1 - lam) * lieb_trace(probe, A1, B1) + lam * lieb_trace(probe, A2, B2)
    return [ctx.atleast(mixed - ends)]


@register("D_joint_convex", "D_alpha(rho || sigma) is jointly convex for 0 < alpha < 1")
def d_joint_convex(ctx: TrialContext):
    r1, r2 = ctx.state(), ctx.state()
    s1, s2 = ctx.positive(), ctx.positive()
    lam = ctx.cycle((0.25, 0.5, 0.75))
    ctx.record(rho1=r1, rho2=r2, sigma1=s1, sigma2=s2, lam=lam)
    rm = DensityMatrix(_mix(lam, r1, r2))
    sm = as_positive(_mix(lam, s1, s2))
    out = []
    for a in ctx.config.alphas_where(_subunit):
        ends = (1 - lam) * renyi_relative(r1, s1, a) + lam * renyi_relative(r2, s2, a)
        out.append(ctx.atleast(ends - renyi_relative(rm, sm, a)))
    return out


@register("D_lower_bound", "D_alpha(rho || sigma) >= -log Tr sigma, with equality only at rho = sigma / Tr sigma")
def d_lower_bound(ctx: TrialContext):
    rho, sigma = ctx.state(), ctx.positive()
    ctx.record(rho=rho, sigma=sigma)
    log_tr = math.log(float(np.trace(sigma.data).real))
    witness = DensityMatrix(sigma.data)
    near, dist = _toward(ctx, witness)
    out = [ctx.atleast(dist, WITNESS_DISTANCE * (1 - 1e-9))]
    for a in ctx.config.alphas_where(_finite):
        out.append(ctx.atleast(renyi_relative(rho, sigma, a) + log_tr))
        if a == 0.0:
            continue  # D_0 cannot separate full-rank states
        out.append(ctx.close(renyi_relative(witness, sigma, a) + log_tr))
        out.append(ctx.atleast(renyi_relative(near, sigma, a) + log_tr, WITNESS_MARGIN))
    return out


@register("unitary_invariance", "S_alpha and D_alpha are invariant under simultaneous unitary conjugation")
def unitary_invariance(ctx: TrialContext):
    rho, sigma, U = ctx.state(), ctx.positive(), ctx.unitary()
    ctx.record(rho=rho, sigma=sigma, U=U)
    rho_u, sigma_u = DensityMatrix(_conj(U, rho)), as_positive(_conj(U, sigma))
    out = []
    for a in ctx.config.alphas:
        S = renyi_entropy(rho, a)
        out.append(ctx.close(renyi_entropy(rho_u, a) - S, 1e-9 * max(1.0, abs(S))))
        if _finite(a):
            D = renyi_relative(rho, sigma, a)
            out.append(ctx.close(renyi_relative(rho_u, sigma_u, a) - D, 1e-9 * max(1.0, abs(D))))
    return out


# -- free energy ----------------------------------------------------------------

def pb_inequality_trial(ctx: TrialContext, tighten: float = 0.0):
    rho, H = ctx.state(), ctx.hermitian()
    beta = ctx.cycle(PB_BETAS)
    ctx.record(rho=rho, H=H, beta=beta)
    logZ = log_partition(H, beta)
    rho0 = gibbs_state(H, beta)
    near, dist = _toward(ctx, rho0)
    out = [ctx.atleast(dist, WITNESS_DISTANCE * (1 - 1e-9))]
    for a in PB_ALPHAS:
        out.append(ctx.atleast(beta * free_energy(rho, H, a, beta) + logZ, tighten))
        at_gibbs = beta * free_energy(rho0, H, a, beta) + logZ
        out.append(ctx.atleast(at_gibbs, tighten))
        out.append(ctx.close(at_gibbs))
        out.append(ctx.atleast(beta * free_energy(near, H, a, beta) + logZ, WITNESS_MARGIN))
    return out


register(
    "pb_inequality",
    "beta F_{alpha,beta}(rho, H) >= -log Z_beta, with equality only at the Gibbs state",
)(pb_inequality_trial)


@register("pb_corollary", "log Tr e^{-alpha H0} e^{(alpha-1) H} / (alpha - 1) >= log Z(H0) / (alpha - 1) - log Z(H) + log Z(H0)")
def pb_corollary(ctx: TrialContext):
    H, H0 = ctx.hermitian(), ctx.hermitian()
    ctx.record(H=H, H0=H0)
    out = []
    for a in ctx.config.alphas_where(_proper):
        def lhs(K):
            e0, e = H0.eig, K.eig
            t = log_trace_spectral(e0, -a * e0.eigenvalues, e, (a - 1.0) * e.eigenvalues)
            return (t - log_partition(H0, 1.0)) / (a - 1.0)

        out.append(ctx.atleast(lhs(H) + log_partition(H, 1.0) - log_partition(H0, 1.0)))
        out.append(ctx.close(lhs(H0)))
    return out


@register("free_energy_is_divergence", "F_{alpha,1}(rho, H) = D_alpha(rho || e^{-H}), F = E - S/beta, and beta-scaling")
def free_energy_is_divergence(ctx: TrialContext):
    rho, H = ctx.state(), ctx.hermitian()
    beta = ctx.cycle(ctx.config.betas)
    ctx.record(rho=rho, H=H, beta=beta)
    sigma = as_positive(matrix_fn(H, SpectralFunction.exp(-1.0)))
    bH = as_hermitian(beta * H.data)
    out = []
    for a in ctx.config.alphas_where(_finite):
        F = free_energy(rho, H, a, beta)
        E = internal_energy(rho, H, a, beta)
        out.append(ctx.close(F - (E - renyi_entropy(rho, a) / beta), 1e-9 * max(1.0, abs(F))))
        out.append(ctx.close(F - free_energy(rho, bH, a, 1.0) / beta, 1e-10 * max(1.0, abs(F))))
        F1 = free_energy(rho, H, a, 1.0)
        out.append(ctx.close(F1 - renyi_relative(rho, sigma, a), 1e-9 * max(1.0, abs(F1))))
    return out


@register("gibbs_local_min", "beta F_{alpha,beta} is minimized by the Gibbs state")
def gibbs_local_min(ctx: TrialContext):
    H = ctx.hermitian()
    beta = ctx.cycle(ctx.config.betas)
    rho0 = gibbs_state(H, beta)
    omega = ctx.state()
    eps = 1e-3
    ctx.record(H=H, beta=beta, omega=omega)
    pert = DensityMatrix(_mix(eps, rho0, omega))
    out = []
    for a in ctx.config.alphas_where(lambda a: _finite(a) and a > 0):
        d = beta * (free_energy(pert, H, a, beta) - free_energy(rho0, H, a, beta))
        out.append(ctx.atleast(d, 0.0, 1e-12))
    return out


@register("alt_energy_comparison", "records |E_alpha - Tr rho^alpha H / Tr rho^alpha| (no assertion)", asserts=False)
def alt_energy_comparison(ctx: TrialContext):
    rho, H = ctx.state(), ctx.hermitian()
    ctx.record(rho=rho, H=H)
    p = rho.spectrum
    U = rho.eig.eigenvectors
    for a in ctx.config.alphas_where(_proper):
        ra = (U * p**a) @ U.conj().T
        alt = float(np.sum(ra * H.data.T).real / np.sum(p**a))
        ctx.observe(f"alpha={a:g}", abs(internal_energy(rho, H, a, 1.0) - alt))
    return []


# -- equilibrium energy -----------------------------------------------------------

@register("alpha_derivative_identity", "equilibrium energy equals the alpha-derivative of -log Z")
def alpha_derivative_identity(ctx: TrialContext):
    H = ctx.hermitian()
    beta = ctx.cycle(ctx.config.betas)
    ctx.record(H=H, beta=beta)
    psi = lambda b: -log_partition(H, b)  # noqa: E731
    rho0 = gibbs_state(H, beta)
    out = []
    for a in ctx.config.alphas_where(lambda a: _finite(a) and a != 1.0):
        E = equilibrium_energy(H, a, beta)
        out.append(ctx.close(E - alpha_derivative(psi, a, beta), 1e-10))
        if a > 0.0 or rho0.spectrum[0] > RANK_TOL:  # at alpha = 0 only the numerical support counts
            out.append(ctx.close(E - internal_energy(rho0, H, a, beta), 1e-9))
    h = 1e-5
    central = (psi(beta + h) - psi(beta - h)) / (2 * h)
    out.append(ctx.close(equilibrium_energy(H, 1.0, beta) - central, 1e-6))
    return out


@register("energy_monotone_beta", "E_{alpha,beta}(rho_0) is non-increasing in beta and lies in [lambda_min, lambda_max]")
def energy_monotone_beta(ctx: TrialContext):
    H = ctx.hermitian()
    ctx.record(H=H)
    w = H.eig.eigenvalues
    lo, hi = float(w[0]), float(w[-1])
    betas = ctx.config.betas
    out = []
    for a in ctx.config.alphas:
        E = [equilibrium_energy(H, a, b) for b in betas]
        out += [ctx.atleast(E[k] - E[k + 1]) for k in range(len(E) - 1)]
        out += [ctx.atleast(e - lo) for e in E] + [ctx.atleast(hi - e) for e in E]
    rho = ctx.state()
    for a in ctx.config.alphas_where(_proper):
        e = internal_energy(rho, H, a, 1.0)
        ctx.observe("non_equilibrium_excursion", max(lo - e, e - hi))
    return out


@register("energy_beta_limits", "E_{alpha,beta}(rho_0) -> lambda_min as beta -> +inf and lambda_max as beta -> -inf")
def energy_beta_limits(ctx: TrialContext):
    n = max(ctx.n, 2)
    # gapped spectrum: both edges isolated by at least 0.5
    inner = ctx.rng.uniform(0.5, 1.5, size=n - 2) if n > 2 else np.empty(0)
    w = np.concatenate([[0.0], inner, [2.0]]) + ctx.rng.normal()
    U = ctx.unitary(n)
    H = as_hermitian((U * w) @ U.conj().T)
    ctx.record(H=H)
    lo, hi = H.eig.eigenvalues[0], H.eig.eigenvalues[-1]
    out = []
    for a in ctx.config.alphas_where(lambda a: a > 0):
        out.append(ctx.close(equilibrium_energy(H, a, LIMIT_BETA) - lo, 1e-8))
        out.append(ctx.close(equilibrium_energy(H, a, -LIMIT_BETA) - hi, 1e-8))
    return out


@register("logZ_concavity", "d^2 log Z / d beta^2 is the Gibbs variance of H and never negative")
def logz_concavity(ctx: TrialContext):
    H = ctx.hermitian()
    beta = ctx.cycle(ctx.config.betas)
    ctx.record(H=H, beta=beta)
    c = logZ_curvature(H, beta)
    _, var = moments(gibbs_state(H, beta), H)
    h = 1e-2
    second = (log_partition(H, beta + h) - 2 * log_partition(H, beta) + log_partition(H, beta - h)) / h**2
    return [
        ctx.atleast(c, 0.0, 1e-10),
        ctx.close(c - var, 1e-9 * max(1.0, var)),
        ctx.close(second - c, 1e-3 * max(1.0, c)),
    ]


# -- uncertainty ------------------------------------------------------------------

@register("schrodinger", "var A var B >= Cov(A,B)^2 + <i[A,B]>^2/4, saturated iff the weighted deviations are proportional")
def schrodinger(ctx: TrialContext):
    rho, A, B = ctx.state(), ctx.hermitian(), ctx.hermitian()
    c, d = ctx.rng.normal(size=2)
    ctx.record(rho=rho, A=A, B=B, c=c, d=d)
    gap = schrodinger_gap(rho, A, B)
    _, va = moments(rho, A)
    _, vb = moments(rho, B)
    Da, Db = deviations(rho, [A, B])
    backbone = (np.vdot(Da, Da).real * np.vdot(Db, Db).real - abs(np.vdot(Db, Da)) ** 2)
    Bs = as_hermitian(c * A.data + d * np.eye(A.n))
    scale = max(1.0, va * vb)
    out = [
        ctx.atleast(gap / scale),
        ctx.atleast(robertson_gap(rho, A, B) - gap, 0.0, 1e-9 * scale),
        ctx.atleast(backbone / scale),
        ctx.close(schrodinger_gap(rho, A, Bs), 1e-10),
        ctx.require(deviations_proportional(rho, A, Bs)),
        ctx.close(covariance(rho, A, B) - covariance(rho, B, A), 1e-12),
        ctx.close(commutator_mean(rho, A, B) + commutator_mean(rho, B, A), 1e-12),
    ]
    return out


def _observables(ctx: TrialContext, m: int):
    rho = ctx.state()
    X = [ctx.hermitian() for _ in range(m)]
    ctx.record(rho=rho, **{f"X{j}": x for j, x in enumerate(X)})
    return build_report(ObservableSet(rho, X))


@register("det_inequality", "det cov >= det(i delta) for even m, strictly when tau is positive definite")
def det_inequality(ctx: TrialContext):
    out = []
    for m in (2, 4):
        rep = _observables(ctx, m)
        scale = max(1.0, float(np.prod(np.diag(rep.cov))))
        if rep.strict:
            out.append(ctx.require(rep.det_gap > 1e-12))
            ctx.observe(f"m={m}:strict_det_gap", rep.det_gap)
        else:
            out.append(ctx.atleast(rep.det_gap / scale))
        out.append(ctx.atleast(rep.tau_min_eig, 0.0, 1e-10))
        out.append(ctx.close(float(np.max(np.abs(rep.tau - rep.cov - rep.delta))), 1e-12))
        out.append(ctx.close(rep.cov_residual, 1e-10))
    return out


@register("lemma_split", "for positive definite C of even order, det Re-part > det(i Im-part)")
def lemma_split(ctx: TrialContext):
    m = ctx.cycle((2, 4, 6))
    G = ctx.complex_matrix(m)
    C = G @ G.conj().T / m + 1e-3 * np.eye(m)
    ctx.record(C=C)
    det_a, det_ib = lemma_split_check(C)
    lam = split_eigenvalues(C)
    return [
        ctx.require(det_a - det_ib > 0.0),
        ctx.atleast((det_a - det_ib) / det_a),
        ctx.atleast(1.0 - float(np.max(np.abs(lam)))),
        ctx.close(float(np.sum(lam)), 1e-9),  # eigenvalues come in +/- pairs
    ]


@register("hadamard_chain", "prod var_j >= det cov >= det(i delta)")
def hadamard_chain(ctx: TrialContext):
    out = []
    for m in (2, 4):
        rep = _observables(ctx, m)
        scale = max(1.0, float(np.prod(np.diag(rep.cov))))
        det_cov = determinant(rep.cov).real
        out.append(ctx.atleast((float(np.prod(np.diag(rep.cov))) - det_cov) / scale))
        out.append(ctx.atleast(rep.det_gap / scale))
        out.append(ctx.atleast((rep.hadamard_gap - rep.det_gap) / scale))
    return out


@register("alpha_shift_rules", "<A + g I>_alpha = <A>_alpha + g, the alpha-variance is shift invariant, positivity is preserved")
def alpha_shift_rules(ctx: TrialContext):
    rho, A = ctx.state(), ctx.hermitian()
    g = float(ctx.rng.normal(scale=2.0))
    P = as_hermitian(A.data - (A.eig.eigenvalues[0] - 0.1) * np.eye(A.n))
    ctx.record(rho=rho, A=A, g=g)
    As = as_hermitian(A.data + g * np.eye(A.n))
    G = as_hermitian(g * np.eye(A.n))
    out = []
    for a in ctx.config.alphas_where(_finite):
        m = alpha_expectation(rho, A, a)
        out.append(ctx.close(alpha_expectation(rho, As, a) - m - g, 1e-9))
        out.append(ctx.close(alpha_expectation(rho, G, a) - g, 1e-9))
        out.append(ctx.close(alpha_variance(rho, As, a) - alpha_variance(rho, A, a), 1e-9))
        out.append(ctx.close(alpha_expectation(rho, as_hermitian(A.data - m * np.eye(A.n)), a), 1e-9))
        out.append(ctx.atleast(alpha_expectation(rho, P, a)))
    return out


@register("alpha_variance_limit", "the alpha-variance tends to the ordinary variance as alpha -> 1")
def alpha_variance_limit(ctx: TrialContext):
    rho, A = ctx.state(), ctx.hermitian()
    ctx.record(rho=rho, A=A)
    _, var = moments(rho, A)
    return [
        ctx.close(alpha_variance(rho, A, 1.0) - var, 1e-10),
        ctx.close(alpha_variance(rho, A, 1.0 - 1e-4) - var, 1e-3),
        ctx.close(alpha_variance(rho, A, 1.0 + 1e-4) - var, 1e-3),
    ]


@register("sandwiched_reduction", "the sandwiched divergence equals D_alpha on commuting pairs")
def sandwiched_reduction(ctx: TrialContext):
    n = ctx.n
    p = ctx.rng.dirichlet(np.ones(n))
    s = ctx.rng.uniform(0.05, 2.0, size=n)
    V = np.eye(n) if ctx.index % 2 == 0 else ctx.unitary()
    rho = DensityMatrix((V * p) @ V.conj().T)
    sigma = as_positive((V * s) @ V.conj().T)
    ctx.record(p=p, s=s, V=V)
    out = []
    for a in (0.5, 2.0):
        out.append(ctx.close(sandwiched_renyi(rho, sigma, a) - renyi_relative(rho, sigma, a), 1e-10))
    witness = DensityMatrix(sigma.data)
    out.append(ctx.close(sandwiched_renyi(witness, witness, 2.0), 1e-10))
    r, q = ctx.state(), ctx.positive()
    D1 = renyi_relative(r, q, 1.0)
    for a in (1.0 - 1e-6, 1.0 + 1e-6, 1.0 - 2e-6, 1.0 + 2e-6):
        out.append(ctx.close(sandwiched_renyi(r, q, a) - D1, 1e-4))
    return out
