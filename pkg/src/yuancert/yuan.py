"""Convex-combination PSD certificates for families of quadratic forms.

`yuan_two` decides the two-matrix case by maximizing the concave map
t -> lambda_min(t*A + (1-t)*B) over [0, 1]; `certify_rank2` extends the
decision to any family whose matrix set has rank at most 2 by a case
recursion on the coordinates of the last member in a two-member basis.

Certificates are always re-verified by an independent eigendecomposition
of the combined matrix; refutations are only emitted with a concrete
witness direction that has been re-checked against the full family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cone import FirstOrderCone, cone_contains, restrict, span_basis
from .errors import InputError, NumericalFailureError
from .numeric_core import (
    DEFAULT_TOL,
    MatrixFamily,
    SymMatrix,
    as_family,
    as_sym,
    express_in_basis,
    flatten_sym,
    matrix_set_rank,
    min_eigenvalue,
    norm_max,
    quad_form,
    sym_eigen,
)

_GOLDEN_TOL = 1e-12
_GOLDEN_CAP = 200
_WITNESS_SAMPLES = 20_000
_WITNESS_SEED = 20170301


class SimplexWeights:
    """Point of the standard simplex: nonnegative weights summing to one."""

    __slots__ = ("t",)

    def __init__(self, t) -> None:
        arr = np.asarray(t, dtype=float).copy()
        if arr.ndim != 1 or arr.size < 1:
            raise InputError("weights must form a nonempty vector")
        if not np.isfinite(arr).all():
            raise InputError("weights have non-finite entries")
        if (arr < 0.0).any():
            raise InputError("weights must be nonnegative")
        if abs(float(arr.sum()) - 1.0) > 1e-12:
            raise InputError("weights must sum to 1")
        arr.setflags(write=False)
        object.__setattr__(self, "t", arr)

    def __setattr__(self, name, value):
        raise AttributeError("SimplexWeights is immutable")

    def __len__(self) -> int:
        return self.t.size

    def __repr__(self) -> str:
        return f"SimplexWeights({self.t.tolist()!r})"


def make_weights(raw) -> SimplexWeights:
    """Clamp tiny negative round-off and renormalize, then validate."""
    arr = np.asarray(raw, dtype=float).copy()
    arr[arr < 0.0] = 0.0
    total = float(arr.sum())
    if total <= 0.0:
        raise InputError("weights must have positive total")
    return SimplexWeights(arr / total)


@dataclass(frozen=True, eq=False)
class Certified:
    weights: SimplexWeights
    lambda_min: float


@dataclass(frozen=True, eq=False)
class Refuted:
    witness: np.ndarray
    form_values: np.ndarray


@dataclass(frozen=True, eq=False)
class HypothesisViolated:
    reason: str
    rank: int | None = None
    witness: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class CertificateReport:
    """Outcome of a certificate search plus diagnostic residuals."""

    outcome: Certified | Refuted | HypothesisViolated
    residuals: dict

    @property
    def certified(self) -> bool:
        return isinstance(self.outcome, Certified)

    @property
    def refuted(self) -> bool:
        return isinstance(self.outcome, Refuted)

    @property
    def hypothesis_violated(self) -> bool:
        return isinstance(self.outcome, HypothesisViolated)


def lambda_min_profile(a: SymMatrix, b: SymMatrix, t: float) -> float:
    """Smallest eigenvalue of the pencil point t*A + (1-t)*B."""
    a, b = as_sym(a), as_sym(b)
    if a.order != b.order:
        raise InputError("matrices must share one order")
    if not 0.0 <= t <= 1.0:
        raise InputError("t must lie in [0, 1]")
    return min_eigenvalue(SymMatrix(t * a.entries + (1.0 - t) * b.entries))


def _golden_max(f, tol: float = _GOLDEN_TOL, cap: int = _GOLDEN_CAP) -> tuple[float, float]:
    """Golden-section maximization of a concave function on [0, 1]."""
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    best_t, best_f = 0.0, f(0.0)
    f1 = f(1.0)
    if f1 > best_f:
        best_t, best_f = 1.0, f1
    lo, hi = 0.0, 1.0
    c = hi - inv * (hi - lo)
    d = lo + inv * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(cap):
        if fc > best_f:
            best_t, best_f = c, fc
        if fd > best_f:
            best_t, best_f = d, fd
        if hi - lo <= tol:
            break
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - inv * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv * (hi - lo)
            fd = f(d)
    mid = 0.5 * (lo + hi)
    fm = f(mid)
    if fm > best_f:
        best_t, best_f = mid, fm
    return best_t, best_f


def _unit_rows(z: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    keep = norms[:, 0] > 0.0
    return z[keep] / norms[keep]


def _batch_forms(x: np.ndarray, mats: list[np.ndarray]) -> np.ndarray:
    """Form values, one row per matrix, one column per sample row of x."""
    return np.stack([np.einsum("ij,jk,ik->i", x, m, x) for m in mats])


def _into_cone(x: np.ndarray, cone: FirstOrderCone) -> np.ndarray:
    """Flip the sign so the ray coordinate is nonnegative (forms are even)."""
    if cone.ray is not None and float(cone.ray @ x) < 0.0:
        return -x
    return x


def _refutation_candidates(mstar: np.ndarray, diff: np.ndarray) -> list[np.ndarray]:
    """Witness candidates from the bottom eigenspace of the optimal pencil.

    At an interior maximizer the derivative of lambda_min vanishes along
    the pencil, so some unit vector in the bottom eigenspace annihilates
    the difference form; it is located by a sweep plus bisection over
    mixtures of the two lowest eigenvectors.
    """
    spec = sym_eigen(SymMatrix(mstar))
    v1 = spec.basis[:, 0].copy()
    cands = [v1]
    if mstar.shape[0] >= 2:
        v2 = spec.basis[:, 1].copy()
        cands.append(v2)
        thetas = np.linspace(0.0, math.pi, 64, endpoint=False)
        mix = np.cos(thetas)[:, None] * v1 + np.sin(thetas)[:, None] * v2
        h = np.einsum("ij,jk,ik->i", mix, diff, mix)
        cands.extend(mix)
        for i in range(len(thetas) - 1):
            if h[i] == 0.0 or h[i] * h[i + 1] > 0.0:
                continue
            a, b = thetas[i], thetas[i + 1]
            ha = h[i]
            for _ in range(80):
                mid = 0.5 * (a + b)
                vm = math.cos(mid) * v1 + math.sin(mid) * v2
                hm = float(vm @ diff @ vm)
                if ha * hm <= 0.0:
                    b = mid
                else:
                    a, ha = mid, hm
            mid = 0.5 * (a + b)
            cands.append(math.cos(mid) * v1 + math.sin(mid) * v2)
    return cands


def yuan_two(
    a: SymMatrix,
    b: SymMatrix,
    cone: FirstOrderCone,
    tol: float = DEFAULT_TOL,
) -> CertificateReport:
    """Two-matrix certificate: a PSD pencil point or a double-negative witness.

    Certifies when max_t lambda_min(t*A + (1-t)*B) restricted to the cone
    span clears -tol*scale; otherwise returns a verified witness x in the
    cone with both forms strictly negative. A witness is guaranteed to
    exist in the refuted case, so exhausting the search budget raises
    NumericalFailureError instead of reporting an unverified negative.
    """
    a, b = as_sym(a), as_sym(b)
    if a.order != b.order or a.order != cone.ambient_dim:
        raise InputError("matrices and cone must share one ambient dimension")
    basis = span_basis(cone)
    k = basis.shape[1]
    if k == 0:
        return CertificateReport(
            Certified(SimplexWeights([0.5, 0.5]), 0.0), {"span_dim": 0.0}
        )
    ar = restrict(a, basis).entries
    br = restrict(b, basis).entries
    scale = 1.0 + max(norm_max(ar), norm_max(br))
    threshold = -tol * scale

    def profile(t: float) -> float:
        return min_eigenvalue(SymMatrix(t * ar + (1.0 - t) * br))

    t_star, lam_star = _golden_max(profile)
    residuals = {"pencil_argmax": t_star, "pencil_max": lam_star}
    if lam_star >= threshold:
        return CertificateReport(
            Certified(make_weights([t_star, 1.0 - t_star]), lam_star), residuals
        )

    mstar = t_star * ar + (1.0 - t_star) * br
    cands = _refutation_candidates(mstar, ar - br)
    witness = _pick_witness(cands, [ar, br], threshold)
    if witness is None:
        rng = np.random.default_rng(_WITNESS_SEED)
        for _ in range(_WITNESS_SAMPLES // 1000):
            x = _unit_rows(rng.standard_normal((1000, k)))
            vals = _batch_forms(x, [ar, br])
            worst = vals.max(axis=0)
            j = int(np.argmin(worst))
            if worst[j] < threshold:
                witness = x[j]
                break
    if witness is None:
        raise NumericalFailureError("refutation witness search budget exhausted")

    x = _into_cone(basis @ witness, cone)
    values = np.array([quad_form(a, x), quad_form(b, x)])
    if not cone_contains(cone, x, 1e-8) or not (values < threshold).all():
        raise NumericalFailureError("refutation witness failed verification")
    return CertificateReport(Refuted(x, values), residuals)


def _pick_witness(cands, mats: list[np.ndarray], threshold: float):
    best, best_margin = None, 0.0
    for v in cands:
        vals = [float(v @ m @ v) for m in mats]
        margin = max(vals)
        if margin < threshold and (best is None or margin < best_margin):
            best, best_margin = v, margin
    return best


def certify_rank2(
    family: MatrixFamily,
    cone: FirstOrderCone,
    tol: float = DEFAULT_TOL,
) -> CertificateReport:
    """Certificate for a symmetric family of matrix-set rank at most 2.

    Follows the constructive case analysis on the coordinates
    (alpha, beta) of the last member in the first two independent
    members: dependent members with nonnegative coordinates are dropped,
    a negative/positive coordinate pattern drops the opposite basis
    member, single-signed pairs reduce to yuan_two, and doubly negative
    coordinates give an explicit zero combination. Rank above 2 is
    reported as a hypothesis violation.
    """
    family = as_family(family)
    syms = family.sym_members()
    m = len(syms)
    if family.order != cone.ambient_dim:
        raise InputError("family and cone must share one ambient dimension")
    basis = span_basis(cone)
    k = basis.shape[1]
    if k == 0:
        return CertificateReport(
            Certified(SimplexWeights(np.full(m, 1.0 / m)), 0.0), {"span_dim": 0.0}
        )
    restricted = [restrict(s, basis).entries for s in syms]
    scale = 1.0 + max(norm_max(r) for r in restricted)
    threshold = -tol * scale

    top = matrix_set_rank(family, tol)
    if top.rank > 2:
        return CertificateReport(
            HypothesisViolated(f"matrix set rank {top.rank} exceeds 2", rank=top.rank),
            {},
        )
    diagnostics = {}
    if top.rank == 2 and top.coefficients is not None:
        worst = 0.0
        for mem, (al, be) in zip(family.members, top.coefficients):
            recon = al * family.members[top.basis[0]] + be * family.members[top.basis[1]]
            worst = max(worst, norm_max(mem - recon) / (1.0 + norm_max(mem)))
        diagnostics["basis_fit_residual"] = worst

    def embed_pair(rep: CertificateReport, i: int, j: int) -> CertificateReport:
        if not rep.certified:
            return rep
        w = np.zeros(m)
        w[i], w[j] = rep.outcome.weights.t
        return CertificateReport(Certified(make_weights(w), rep.outcome.lambda_min), rep.residuals)

    def solve_rank1(idxs: list[int]) -> CertificateReport:
        flats = [flatten_sym(syms[i].entries) for i in idxs]
        ref_pos = max(range(len(idxs)), key=lambda p: float(flats[p] @ flats[p]))
        fref = flats[ref_pos]
        coeffs = np.array([float(f @ fref) / float(fref @ fref) for f in flats])
        spec = sym_eigen(SymMatrix(restricted[idxs[ref_pos]]))
        lam_lo = float(spec.eigenvalues[0])
        lam_hi = float(spec.eigenvalues[-1])
        tau = tol * scale
        spread = max(abs(lam_lo), abs(lam_hi))

        def unit(pos: int, lam: float) -> CertificateReport:
            w = np.zeros(m)
            w[idxs[pos]] = 1.0
            return CertificateReport(Certified(SimplexWeights(w), lam), {})

        def uniform() -> CertificateReport:
            w = np.zeros(m)
            w[idxs] = 1.0 / len(idxs)
            return CertificateReport(Certified(make_weights(w), 0.0), {})

        def refute(direction_col: int) -> CertificateReport:
            v = spec.basis[:, direction_col].copy()
            x = _into_cone(basis @ v, cone)
            values = np.array([quad_form(s, x) for s in syms])
            return CertificateReport(Refuted(x, values), {})

        if spread <= tau:
            return uniform()  # reference vanishes on the span
        # a coefficient counts as zero only when the unit weight on it is
        # provably inside the certificate threshold
        zero = np.flatnonzero(np.abs(coeffs) * spread <= 0.5 * tau)
        if zero.size:
            return unit(int(zero[0]), 0.0)
        psd = lam_lo >= -tau
        nsd = lam_hi <= tau
        pos = np.flatnonzero(coeffs > 0.0)
        neg = np.flatnonzero(coeffs < 0.0)
        if psd and nsd:
            return uniform()
        if psd:
            if pos.size:
                p = int(pos[0])
                return unit(p, coeffs[p] * lam_lo)
            return refute(-1)  # all coefficients negative, top direction kills every form
        if nsd:
            if neg.size:
                p = int(neg[0])
                return unit(p, coeffs[p] * lam_hi)
            return refute(0)
        # indefinite reference
        if pos.size and neg.size:
            i, j = int(pos[0]), int(neg[0])
            ci, cj = coeffs[i], coeffs[j]
            w = np.zeros(m)
            w[idxs[i]] = -cj / (ci - cj)
            w[idxs[j]] = ci / (ci - cj)
            return CertificateReport(Certified(make_weights(w), 0.0), {})
        return refute(0 if pos.size else -1)

    def solve(idxs: list[int]) -> CertificateReport:
        sub = MatrixFamily([syms[i] for i in idxs])
        sr = matrix_set_rank(sub, tol)
        if sr.rank == 0:
            w = np.zeros(m)
            w[idxs] = 1.0 / len(idxs)
            return CertificateReport(Certified(make_weights(w), 0.0), {})
        if sr.rank == 1:
            return solve_rank1(idxs)
        if len(idxs) == 2:
            rep = yuan_two(syms[idxs[0]], syms[idxs[1]], cone, tol=tol)
            return embed_pair(rep, idxs[0], idxs[1])
        b1, b2 = idxs[sr.basis[0]], idxs[sr.basis[1]]
        rest = [i for i in idxs if i != b1 and i != b2]
        last = rest[-1]
        alpha, beta = express_in_basis(syms[last], syms[b1], syms[b2], tol)
        ctol = tol * (1.0 + abs(alpha) + abs(beta))
        sa = 0 if abs(alpha) <= ctol else (1 if alpha > 0.0 else -1)
        sb = 0 if abs(beta) <= ctol else (1 if beta > 0.0 else -1)
        if sa >= 0 and sb >= 0:
            # negative first two forms would force the last one negative
            return solve([i for i in idxs if i != last])
        if sa < 0 and sb == 0:
            return embed_pair(yuan_two(syms[b1], syms[last], cone, tol=tol), b1, last)
        if sa == 0 and sb < 0:
            return embed_pair(yuan_two(syms[b2], syms[last], cone, tol=tol), b2, last)
        if sa < 0 and sb > 0:
            return solve([i for i in idxs if i != b2])
        if sa > 0 and sb < 0:
            return solve([i for i in idxs if i != b1])
        # alpha < 0 and beta < 0: the combination below is the zero matrix
        denom = 1.0 - alpha - beta
        w = np.zeros(m)
        w[b1] = -alpha / denom
        w[b2] = -beta / denom
        w[last] = 1.0 / denom
        return CertificateReport(Certified(make_weights(w), 0.0), {})

    report = solve(list(range(m)))

    if report.certified:
        weights = report.outcome.weights
        combined = np.zeros_like(restricted[0])
        for w, r in zip(weights.t, restricted):
            combined += w * r
        lam = min_eigenvalue(SymMatrix(0.5 * (combined + combined.T)))
        if lam < threshold:
            raise NumericalFailureError(
                f"certificate failed verification (lambda_min {lam:.3e})"
            )
        residuals = dict(report.residuals, **diagnostics)
        residuals["combined_lambda_min"] = lam
        residuals["weight_sum_error"] = abs(float(weights.t.sum()) - 1.0)
        return CertificateReport(Certified(weights, lam), residuals)

    if report.refuted:
        x = report.outcome.witness
        values = np.array([quad_form(s, x) for s in syms])
        if not cone_contains(cone, x, 1e-8) or not (values < threshold).all():
            raise NumericalFailureError("witness did not transfer to the full family")
        residuals = dict(report.residuals, **diagnostics)
        residuals["worst_form_value"] = float(values.max())
        return CertificateReport(Refuted(x, values), residuals)

    return report
