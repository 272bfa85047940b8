"""Finite signaling-game instances and their closed-form values.

A game instance stacks the information of interest ``x`` and the private
information ``y`` into state vectors ``z = [x; y]`` of dimension ``2m``. The
sender's objective reduces to ``tr(Vbar @ Xi)`` over posterior-correlation
matrices, with ``Vbar = Z' V Z`` and a variant-dependent cost matrix ``V``:

* deception:  V = [[I, -I], [-I, O]]   (sender wants x perceived as y)
* privacy:    V = [[-I, O], [O, I]]    (sender leaks x, hides y)

Null signaling evaluates the objective at ``Xi = p_o p_o'`` and full
signaling at ``Xi = diag(p_o)``.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

PROB_TOL = 1e-12


class ProblemFormatError(ValueError):
    """Malformed problem file; the message names the offending field."""


@dataclass(frozen=True)
class JointPmf:
    """Discrete joint distribution over stacked states z = [x; y] in R^{2m}."""

    m: int
    states: np.ndarray  # (n, 2m), one state per row
    probs: np.ndarray   # (n,), strictly positive, sums to 1

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        states = np.atleast_2d(np.array(self.states, dtype=np.float64, copy=True))
        probs = np.array(self.probs, dtype=np.float64, copy=True).ravel()
        n = states.shape[0]
        if n < 1:
            raise ValueError("need at least one state")
        if states.shape[1] != 2 * self.m:
            raise ValueError(f"states must have dimension 2m = {2 * self.m}")
        if probs.shape != (n,):
            raise ValueError("probs length must match the number of states")
        if not np.all(np.isfinite(states)):
            raise ValueError("states must be finite")
        if np.any(probs < PROB_TOL):
            raise ValueError("probabilities must be strictly positive (full support)")
        if abs(probs.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        if n > 1:
            gap = np.max(np.abs(states[:, None, :] - states[None, :, :]), axis=2)
            dup = np.argwhere(np.triu(gap < PROB_TOL, k=1))
            if dup.size:
                i, j = dup[0]
                raise ValueError(f"duplicate states at indices {i} and {j}")
        states.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "probs", probs)

    @property
    def n(self) -> int:
        return self.states.shape[0]

    @property
    def z_matrix(self) -> np.ndarray:
        """States as columns: Z is 2m x n."""
        return self.states.T


class CostVariant:
    """Tag selecting the sender's quadratic cost structure."""

    DECEPTION = "deception"
    PRIVACY = "privacy"

    @staticmethod
    def cost_matrix(variant: str, m: int) -> np.ndarray:
        eye = np.eye(m)
        zero = np.zeros((m, m))
        if variant == CostVariant.DECEPTION:
            return np.block([[eye, -eye], [-eye, zero]])
        if variant == CostVariant.PRIVACY:
            return np.block([[-eye, zero], [zero, eye]])
        raise ValueError(f"unknown variant {variant!r}")


@dataclass(frozen=True)
class FullPrior:
    """Constrain the full prior: Xi 1 = p_o."""


@dataclass(frozen=True)
class FixedMean:
    """Constrain only the prior mean: [Z; 1'] Xi 1 = [mu_o; 1]."""

    mu: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=np.float64, copy=True).ravel()
        mu.flags.writeable = False
        object.__setattr__(self, "mu", mu)


ConstraintMode = FullPrior | FixedMean


@dataclass(frozen=True)
class SignalingProblem:
    pmf: JointPmf
    variant: str
    mode: ConstraintMode
    Z: np.ndarray        # 2m x n
    V: np.ndarray        # 2m x 2m
    Vbar: np.ndarray     # n x n, = Z'VZ
    p_o: np.ndarray
    yy_trace: float      # tr(E[yy']), the deception cost's constant term
    zz_trace_p: float    # tr(V^p E[zz']), meaningful under privacy

    @property
    def n(self) -> int:
        return self.pmf.n

    @property
    def m(self) -> int:
        return self.pmf.m

    def constraint_operator(self) -> tuple[np.ndarray, np.ndarray]:
        """(W, rhs) such that feasibility reads W @ (Xi @ 1) = rhs."""
        if isinstance(self.mode, FullPrior):
            return np.eye(self.n), self.p_o.copy()
        W = np.vstack([self.Z, np.ones((1, self.n))])
        rhs = np.concatenate([self.mode.mu, [1.0]])
        return W, rhs


def build_problem(pmf: JointPmf, variant: str, mode: ConstraintMode | None = None) -> SignalingProblem:
    """Assemble the reduced objective data for a finite game instance."""
    if mode is None:
        mode = FullPrior()
    if isinstance(mode, FixedMean) and mode.mu.shape != (2 * pmf.m,):
        raise ValueError(f"fixed mean must have dimension 2m = {2 * pmf.m}")
    Z = pmf.z_matrix.copy()
    V = CostVariant.cost_matrix(variant, pmf.m)
    Vbar = Z.T @ V @ Z
    Vbar = 0.5 * (Vbar + Vbar.T)  # enforce exact symmetry against round-off
    y_block = pmf.states[:, pmf.m:]
    yy_trace = float(np.sum(pmf.probs * np.sum(y_block * y_block, axis=1)))
    Vp = CostVariant.cost_matrix(CostVariant.PRIVACY, pmf.m)
    zz_trace_p = float(np.sum(pmf.probs * np.einsum("ni,ij,nj->n", pmf.states, Vp, pmf.states)))
    for arr in (Z, V, Vbar):
        arr.flags.writeable = False
    p_o = pmf.probs.copy()
    p_o.flags.writeable = False
    return SignalingProblem(pmf, variant, mode, Z, V, Vbar, p_o, yy_trace, zz_trace_p)


def null_signaling_value(problem: SignalingProblem) -> float:
    """tr(Vbar p_o p_o'): cost of sending one constant signal."""
    return float(problem.p_o @ problem.Vbar @ problem.p_o)


def full_signaling_value(problem: SignalingProblem) -> float:
    """tr(Vbar diag(p_o)): cost of revealing the state exactly."""
    return float(np.sum(np.diag(problem.Vbar) * problem.p_o))


def posterior_correlation(problem: SignalingProblem, Xi: np.ndarray) -> np.ndarray:
    """Map an n x n posterior-mass matrix to E[zhat zhat'] = Z Xi Z'."""
    Xi = np.asarray(Xi, dtype=np.float64)
    if Xi.shape != (problem.n, problem.n):
        raise ValueError(f"Xi must be {problem.n}x{problem.n}")
    if np.max(np.abs(Xi - Xi.T)) > 1e-9 * (1.0 + np.max(np.abs(Xi))):
        raise ValueError("Xi must be symmetric")
    return problem.Z @ Xi @ problem.Z.T


def sender_total_cost(problem: SignalingProblem, objective_value: float) -> float:
    """Restore the constant term dropped from the reduced objective.

    Deception: total = tr(E[yy']) + tr(Vbar Xi).
    Privacy:   total = tr(Vbar Xi) - tr(V^p E[zz']).
    """
    if problem.variant == CostVariant.DECEPTION:
        return problem.yy_trace + objective_value
    return objective_value - problem.zz_trace_p


# -- problem file I/O -------------------------------------------------------

def _require(doc: dict, field: str):
    if field not in doc:
        raise ProblemFormatError(f"missing field '{field}'")
    return doc[field]


def parse_problem(doc: dict) -> SignalingProblem:
    """Build a problem from a parsed JSON document (see README for schema)."""
    if not isinstance(doc, dict):
        raise ProblemFormatError("problem document must be a JSON object")
    m = _require(doc, "m")
    states = _require(doc, "states")
    probs = _require(doc, "probs")
    variant = _require(doc, "variant")
    if not isinstance(m, int) or m < 1:
        raise ProblemFormatError("field 'm' must be a positive integer")
    if variant not in (CostVariant.DECEPTION, CostVariant.PRIVACY):
        raise ProblemFormatError("field 'variant' must be 'deception' or 'privacy'")
    mode_doc = doc.get("mode", {"full_prior": True})
    if not isinstance(mode_doc, dict):
        raise ProblemFormatError("field 'mode' must be an object")
    if "fixed_mean" in mode_doc:
        mode: ConstraintMode = FixedMean(np.asarray(mode_doc["fixed_mean"], dtype=np.float64))
    elif mode_doc.get("full_prior", False):
        mode = FullPrior()
    else:
        raise ProblemFormatError("field 'mode' must contain 'full_prior' or 'fixed_mean'")
    try:
        pmf = JointPmf(m, np.asarray(states, dtype=np.float64), np.asarray(probs, dtype=np.float64))
        return build_problem(pmf, variant, mode)
    except ValueError as exc:
        raise ProblemFormatError(str(exc)) from exc


def load_problem(path: str | Path) -> SignalingProblem:
    """Load and validate a problem JSON file."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"invalid JSON: {exc}") from exc
    return parse_problem(doc)
