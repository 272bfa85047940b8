"""Signaling strategies, their induced mass matrices, and realized costs.

A strategy is a stochastic kernel pi(s|z) stored as a k x n column-stochastic
matrix. Every strategy induces a completely positive matrix

    Xi[i, j] = sum_s p(s) p_s(z_i) p_s(z_j),      p_s(z) = pi(s|z) p_o(z) / p(s)

with Xi 1 = p_o, and conversely every such matrix factors back into a valid
strategy through pi(s_i|z_j) = (b_i'1) b_{i,j} / p_o(z_j). Signals sent with
probability below 1e-12 are treated as never sent.
"""

from dataclasses import dataclass

import numpy as np

from .model import CostVariant, JointPmf

SIGNAL_TOL = 1e-12
COLUMN_TOL = 1e-9


@dataclass(frozen=True)
class SignalingStrategy:
    """Stochastic kernel pi with pi[i, j] = P(send s_i | state z_j)."""

    pi: np.ndarray

    def __post_init__(self):
        pi = np.atleast_2d(np.array(self.pi, dtype=np.float64, copy=True))
        if np.any(pi < -COLUMN_TOL) or np.any(pi > 1.0 + COLUMN_TOL):
            raise ValueError("kernel entries must lie in [0, 1]")
        sums = pi.sum(axis=0)
        if np.max(np.abs(sums - 1.0)) > COLUMN_TOL:
            raise ValueError("kernel columns must sum to 1")
        pi.flags.writeable = False
        object.__setattr__(self, "pi", pi)

    @property
    def signal_count(self) -> int:
        return self.pi.shape[0]

    @property
    def state_count(self) -> int:
        return self.pi.shape[1]


@dataclass(frozen=True)
class PosteriorSystem:
    """Signal probabilities, posterior rows and posterior means.

    Rows of ``posteriors`` are defined only where ``active`` is set
    (p(s) > 1e-12); inactive rows are zero-filled.
    """

    signal_probs: np.ndarray      # (k,)
    posteriors: np.ndarray        # (k, n)
    posterior_means: np.ndarray   # (2m, k)
    active: np.ndarray            # (k,) bool


def identity_strategy(n: int) -> SignalingStrategy:
    """Full disclosure: signal i deterministically for state i."""
    return SignalingStrategy(np.eye(n))


def constant_strategy(n: int) -> SignalingStrategy:
    """Null signaling: one signal regardless of the state."""
    return SignalingStrategy(np.ones((1, n)))


def _check_shapes(strategy: SignalingStrategy, pmf: JointPmf):
    if strategy.state_count != pmf.n:
        raise ValueError(
            f"strategy covers {strategy.state_count} states, pmf has {pmf.n}"
        )


def posteriors(strategy: SignalingStrategy, pmf: JointPmf) -> PosteriorSystem:
    """Bayes updates: p(s), p_s(z) and the posterior means Z p_s."""
    _check_shapes(strategy, pmf)
    joint = strategy.pi * pmf.probs[None, :]      # (k, n): P(s, z)
    ps = joint.sum(axis=1)
    active = ps > SIGNAL_TOL
    post = np.zeros_like(joint)
    post[active] = joint[active] / ps[active, None]
    means = pmf.z_matrix @ post.T                 # (2m, k)
    means[:, ~active] = 0.0
    return PosteriorSystem(ps, post, means, active)


def induced_cp_matrix(strategy: SignalingStrategy, pmf: JointPmf) -> np.ndarray:
    """Xi_pi[i, j] = sum over sent signals of p(s) p_s(z_i) p_s(z_j)."""
    sys = posteriors(strategy, pmf)
    q = sys.posteriors[sys.active]
    w = sys.signal_probs[sys.active]
    A = q.T * np.sqrt(w)[None, :]
    return A @ A.T


def decompose_strategy(strategy: SignalingStrategy, pmf: JointPmf) -> list[np.ndarray]:
    """Rank-one factor columns a_s = p_s(.) sqrt(p(s)), omitting unsent signals."""
    sys = posteriors(strategy, pmf)
    return [
        sys.posteriors[s] * np.sqrt(sys.signal_probs[s])
        for s in range(strategy.signal_count)
        if sys.active[s]
    ]


def extract_strategy(
    factor_columns: list[np.ndarray],
    p_o: np.ndarray,
    tol: float = 1e-7,
) -> SignalingStrategy:
    """Turn a nonnegative factorization Xi = sum b_i b_i' into a strategy.

    Requires sum_i b_i (b_i'1) = p_o within ``tol``; all-zero columns are
    dropped. The kernel columns are renormalized so the result is exactly
    column-stochastic even when the factorization carries solver round-off.
    """
    p_o = np.asarray(p_o, dtype=np.float64)
    if np.any(p_o <= 0.0):
        raise ValueError("prior must have full support")
    cols = [np.asarray(b, dtype=np.float64) for b in factor_columns]
    cols = [b for b in cols if float(b.sum()) > SIGNAL_TOL]
    if not cols:
        raise ValueError("factorization has no nonzero columns")
    if any(np.any(b < -SIGNAL_TOL) for b in cols):
        raise ValueError("factor columns must be nonnegative")
    row_sum = np.zeros_like(p_o)
    for b in cols:
        row_sum += b * b.sum()
    err = float(np.max(np.abs(row_sum - p_o)))
    if err > tol:
        raise ValueError(f"factorization inconsistent with the prior (error {err:.3g})")
    pi = np.vstack([(b.sum() * b) / p_o for b in cols])
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum(axis=0, keepdims=True)
    return SignalingStrategy(pi)


def merge_duplicate_signals(
    strategy: SignalingStrategy, pmf: JointPmf, tol: float = 1e-9
) -> SignalingStrategy:
    """Merge signals whose posteriors coincide within ``tol``.

    Induces the same mass matrix up to the merge tolerance; used to shrink
    solver output toward the revelation-principle size k <= n (not
    guaranteed to reach it).
    """
    sys = posteriors(strategy, pmf)
    groups: list[list[int]] = []
    for s in range(strategy.signal_count):
        if not sys.active[s]:
            continue
        for g in groups:
            if np.max(np.abs(sys.posteriors[g[0]] - sys.posteriors[s])) <= tol:
                g.append(s)
                break
        else:
            groups.append([s])
    rows = [strategy.pi[g].sum(axis=0) for g in groups]
    return SignalingStrategy(np.vstack(rows))


def realized_costs(
    strategy: SignalingStrategy, pmf: JointPmf, variant: str
) -> tuple[float, float]:
    """(sender cost, receiver cost) under the receiver's best response.

    Deception: sender pays E||y - xhat||^2, receiver pays E||x - xhat||^2.
    Privacy: the receiver estimates both blocks, paying
    E||x - xhat||^2 + E||y - yhat||^2, while the sender pays the difference
    E||x - xhat||^2 - E||y - yhat||^2.
    """
    _check_shapes(strategy, pmf)
    m = pmf.m
    sys = posteriors(strategy, pmf)
    joint = strategy.pi * pmf.probs[None, :]
    x = pmf.states[:, :m]
    y = pmf.states[:, m:]
    xhat = sys.posterior_means[:m, :].T   # (k, m)
    yhat = sys.posterior_means[m:, :].T

    ex_err = 0.0   # E||x - xhat||^2
    ey_err = 0.0   # E||y - yhat||^2
    exy = 0.0      # E||y - xhat||^2
    for s in range(strategy.signal_count):
        if not sys.active[s]:
            continue
        w = joint[s]
        ex_err += float(w @ np.sum((x - xhat[s]) ** 2, axis=1))
        ey_err += float(w @ np.sum((y - yhat[s]) ** 2, axis=1))
        exy += float(w @ np.sum((y - xhat[s]) ** 2, axis=1))

    if variant == CostVariant.DECEPTION:
        return exy, ex_err
    if variant == CostVariant.PRIVACY:
        return ex_err - ey_err, ex_err + ey_err
    raise ValueError(f"unknown variant {variant!r}")


@dataclass(frozen=True)
class SimulationResult:
    posterior_corr: np.ndarray   # empirical E[zhat zhat']
    objective: float             # empirical tr(V zhat zhat')
    objective_se: float
    sender_cost: float
    sender_se: float
    receiver_cost: float
    receiver_se: float
    samples: int
    seed: int


def simulate(
    strategy: SignalingStrategy,
    pmf: JointPmf,
    samples: int,
    seed: int,
    variant: str = CostVariant.DECEPTION,
) -> SimulationResult:
    """Monte Carlo check of the induced posterior correlation and costs.

    Draws z ~ p_o then s ~ pi(.|z) with numpy's seeded PCG64 generator
    (``np.random.default_rng(seed)``), and evaluates each draw with the
    exact Bayes posterior of its signal label, so the only randomness is in
    the signal frequencies. Deterministic per seed.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    _check_shapes(strategy, pmf)
    m = pmf.m
    sys = posteriors(strategy, pmf)
    V = CostVariant.cost_matrix(variant, m)
    k, n = strategy.pi.shape

    rng = np.random.default_rng(seed)
    z_idx = np.searchsorted(np.cumsum(pmf.probs), rng.random(samples), side="right")
    z_idx = np.minimum(z_idx, n - 1)
    cum_pi = np.cumsum(strategy.pi, axis=0)       # (k, n)
    u = rng.random(samples)
    s_idx = (u[:, None] >= cum_pi[:, z_idx].T).sum(axis=1)
    s_idx = np.minimum(s_idx, k - 1)

    counts = np.zeros((k, n))
    np.add.at(counts, (s_idx, z_idx), 1.0)
    freq_s = counts.sum(axis=1) / samples

    means = sys.posterior_means                    # (2m, k)
    corr = (means * freq_s[None, :]) @ means.T

    # per-signal objective value and per-(signal, state) costs
    v_s = np.einsum("is,ij,js->s", means, V, means)
    objective = float(freq_s @ v_s)
    obj_var = float(freq_s @ (v_s - objective) ** 2)

    x = pmf.states[:, :m]
    y = pmf.states[:, m:]
    xhat = means[:m, :].T
    yhat = means[m:, :].T
    ex_err = np.stack([np.sum((x - xhat[s]) ** 2, axis=1) for s in range(k)])  # (k, n)
    ey_err = np.stack([np.sum((y - yhat[s]) ** 2, axis=1) for s in range(k)])
    exy = np.stack([np.sum((y - xhat[s]) ** 2, axis=1) for s in range(k)])
    if variant == CostVariant.DECEPTION:
        sender_mat, receiver_mat = exy, ex_err
    else:
        sender_mat, receiver_mat = ex_err - ey_err, ex_err + ey_err

    wfreq = counts / samples
    sender = float(np.sum(wfreq * sender_mat))
    sender_var = float(np.sum(wfreq * (sender_mat - sender) ** 2))
    receiver = float(np.sum(wfreq * receiver_mat))
    receiver_var = float(np.sum(wfreq * (receiver_mat - receiver) ** 2))

    rt = float(np.sqrt(samples))
    return SimulationResult(
        posterior_corr=corr,
        objective=objective,
        objective_se=float(np.sqrt(obj_var)) / rt,
        sender_cost=sender,
        sender_se=float(np.sqrt(sender_var)) / rt,
        receiver_cost=receiver,
        receiver_se=float(np.sqrt(receiver_var)) / rt,
        samples=samples,
        seed=seed,
    )


def strategy_report(
    strategy: SignalingStrategy,
    pmf: JointPmf,
    variant: str,
    objective: float,
) -> dict:
    """Report document with the exact field names of the JSON schema."""
    sys = posteriors(strategy, pmf)
    sender, receiver = realized_costs(strategy, pmf, variant)
    return {
        "signals": strategy.signal_count,
        "pi": strategy.pi.tolist(),
        "posterior_means": sys.posterior_means.T.tolist(),
        "objective": float(objective),
        "sender_cost": sender,
        "receiver_cost": receiver,
    }
